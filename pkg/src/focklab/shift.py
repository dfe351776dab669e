"""Differentiation on F_(m,2) as a weighted backward shift.

With ``e_n = z^n / ||z^n||`` the operator acts as ``D e_n = w_n e_(n-1)``,
``w_n = n ||z^(n-1)|| / ||z^n||``. From the closed monomial norms,

    w_n^2 = n^2 2^(2/m) Gamma(2n/m) / Gamma(2n/m + 2/m),

which is evaluated as a log-Gamma ratio so that no large Gamma values are
ever divided.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.special import logsumexp

from focklab.norms import log_monomial_norm_p
from focklab.series import LogMagnitude
from focklab.special import log_gamma_ratio

SVD_CHECK_MAX_DIM = 400
FIT_MIN_N = 100
KERNEL_TERM_CAP = 10 ** 6
KERNEL_CHUNK = 4096


class ToleranceError(ArithmeticError):
    """A series or decomposition did not reach its accuracy target."""


@dataclass(frozen=True, eq=False)
class ShiftSpectrum:
    m: float
    dim: int
    log_weights: np.ndarray

    @property
    def weights(self) -> np.ndarray:
        """``w_1..w_N`` (index 0 holds ``w_1``)."""
        return np.exp(self.log_weights)

    def operator_norm(self) -> float:
        return float(np.exp(self.log_weights.max()))


def log_shift_weights(m, n):
    n = np.asarray(n, dtype=float)
    half = (2.0 * np.log(n) + (2.0 / m) * math.log(2.0)
            - log_gamma_ratio(2.0 * n / m, np.full(n.shape, 2.0 / m)))
    return 0.5 * half


def shift_weights(m: float, N: int) -> ShiftSpectrum:
    if not (math.isfinite(m) and m > 0):
        raise ValueError("m must be positive")
    if N < 1:
        raise ValueError("truncation N must be at least 1")
    lw = np.atleast_1d(log_shift_weights(m, np.arange(1, N + 1)))
    lw.setflags(write=False)
    return ShiftSpectrum(float(m), int(N), lw)


def truncated_matrix(spec: ShiftSpectrum, sparse: bool = False):
    """Finite section of the shift on ``e_0..e_N``: entry ``(n-1, n) = w_n``."""
    M = sp.diags(spec.weights, offsets=1, shape=(spec.dim + 1, spec.dim + 1), format="csr")
    return M if sparse else M.toarray()


def singular_values(spec: ShiftSpectrum, verify: bool = True) -> np.ndarray:
    """Singular values of the finite section, sorted descending.

    ``D*D`` is diagonal with entries ``w_n^2``, so these are the weights
    themselves. For ``N <= SVD_CHECK_MAX_DIM`` the claim is checked against
    a dense LAPACK SVD of the matrix (the extra zero singular value of the
    square section is dropped).
    """
    s = np.sort(spec.weights)[::-1]
    if verify and spec.dim <= SVD_CHECK_MAX_DIM:
        dense = np.linalg.svd(truncated_matrix(spec), compute_uv=False)[: spec.dim]
        if not np.allclose(dense, s, rtol=1e-8, atol=0.0):
            raise ToleranceError("dense SVD disagrees with the shift weights")
    return s


@dataclass(frozen=True)
class SchattenProbe:
    p: float
    partial_sum: LogMagnitude
    fitted_exponent: float
    fit_window: tuple
    diagonal_sum: float
    critical_p: float
    diverges: bool
    fitted_diverges: bool


def schatten_partial(spec: ShiftSpectrum, p: float) -> SchattenProbe:
    """Partial Schatten sum ``sum_(n<=N) w_n^p`` and the decay exponent of ``w_n``.

    The exponent is the least-squares slope of ``log w_n`` against ``log n``
    over ``[N/100, N]``. If ``w_n ~ n^beta`` then the full sum diverges iff
    ``beta p >= -1``. ``critical_p`` is the analytic threshold ``m/(1-m)``
    (``inf`` for ``m >= 1``) and ``diverges`` is ``p <= critical_p``;
    ``fitted_diverges`` applies the same test to the fitted slope, which is
    knife-edge at ``p = critical_p``. ``diagonal_sum`` is ``sum |<D e_n, e_n>|^p`` read off the
    diagonal of the finite section.
    """
    if not p > 0:
        raise ValueError("Schatten exponent must be positive")
    if spec.dim < FIT_MIN_N:
        raise ValueError(f"need N >= {FIT_MIN_N} to fit the decay exponent")
    lw = spec.log_weights
    total = LogMagnitude(float(logsumexp(p * lw)))
    lo = max(1, spec.dim // 100)
    n = np.arange(lo, spec.dim + 1)
    slope = float(np.polyfit(np.log(n), lw[lo - 1:], 1)[0])
    diag = truncated_matrix(spec, sparse=True).diagonal()
    diagonal_sum = float(np.sum(np.abs(diag) ** p))
    m = spec.m
    critical = m / (1.0 - m) if m < 1 else math.inf
    return SchattenProbe(p, total, slope, (lo, spec.dim), diagonal_sum, critical,
                         bool(p <= critical * (1.0 + 1e-12)), bool(slope * p >= -1.0))


@dataclass(frozen=True)
class KernelSum:
    w: complex
    log_norm_sq: LogMagnitude
    log_dbar_norm_sq: LogMagnitude
    tail_bound: float
    terms: int


def _certified_log_sum(log_term, rel_tol):
    """Sum ``exp(log_term(n))`` for ``n = 0, 1, ...`` until the geometric tail
    bound certifies relative error ``rel_tol``.

    Requires the term ratio to be eventually nonincreasing; once it is below
    1/2 the remainder after term ``n`` is at most ``t_n q / (1 - q)``.
    Returns ``(log_sum, relative_tail_bound, terms_used)``.
    """
    acc = -math.inf
    start = 0
    while start < KERNEL_TERM_CAP:
        n = np.arange(start, start + KERNEL_CHUNK)
        lt = log_term(n)
        q = np.exp(np.diff(lt, append=log_term(np.array([n[-1] + 1]))))
        running = np.logaddexp(acc, np.logaddexp.accumulate(lt))
        with np.errstate(divide="ignore", invalid="ignore"):
            tail = lt + np.log(q) - np.log1p(-q) - running
        ok = np.flatnonzero((q < 0.5) & (tail < math.log(rel_tol)))
        if ok.size:
            k = ok[0]
            return float(running[k]), float(math.exp(tail[k])), int(n[k] + 1)
        acc = running[-1]
        start += KERNEL_CHUNK
    raise ToleranceError("kernel series tail not certified within the term budget")


def kernel_norms(m: float, w: complex, rel_tol: float = 1e-12) -> KernelSum:
    """Norms of the reproducing kernel of F_(m,2) at ``w`` and of its
    ``d/d(w bar)`` derivative, from their orthonormal-basis expansions::

        ||K_w||^2      = sum_n |w|^(2n) / ||z^n||^2
        ||dK_w/dwbar||^2 = sum_n n^2 |w|^(2n-2) / ||z^n||^2
    """
    if not 0 < rel_tol < 1:
        raise ValueError("rel_tol must lie in (0, 1)")
    r = abs(complex(w))
    if r == 0:
        k0 = -log_monomial_norm_p(m, 2.0, 0)
        k1 = -log_monomial_norm_p(m, 2.0, 1)
        return KernelSum(complex(w), LogMagnitude(k0), LogMagnitude(k1), 0.0, 2)
    lr = math.log(r)

    def kernel_term(n):
        return 2.0 * n * lr - log_monomial_norm_p(m, 2.0, n)

    def dbar_term(n):
        n = n + 1
        return 2.0 * np.log(n) + 2.0 * (n - 1) * lr - log_monomial_norm_p(m, 2.0, n)

    lk, tk, nk = _certified_log_sum(kernel_term, rel_tol)
    ld, td, nd = _certified_log_sum(dbar_term, rel_tol)
    return KernelSum(complex(w), LogMagnitude(lk), LogMagnitude(ld), max(tk, td), max(nk, nd))


def kernel_log_offsets(m: float, ks: KernelSum) -> tuple:
    """Distances of the kernel sums from their large-``|w|`` shapes.

    Returns ``log||K_w||^2 - (2|w|^m + (m-2) log|w|)`` and
    ``log||dK_w/dwbar||^2 - log||K_w||^2 - (2m-2) log|w|``. Both settle to
    constants as ``|w|`` grows; for ``m = 2`` the first is ``log(2/pi)``.
    """
    r = abs(ks.w)
    if r == 0:
        raise ValueError("offsets are defined for w != 0")
    lr = math.log(r)
    k = ks.log_norm_sq.log_value
    return (k - (2.0 * r ** m + (m - 2.0) * lr),
            ks.log_dbar_norm_sq.log_value - k - (2.0 * m - 2.0) * lr)
