"""Spectrum and resolvent of ``D`` on F_(m,p), ``m <= 1``."""

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from focklab.norms import WeightParams, series_norm
from focklab.quadrature import log_plane_integral
from focklab.series import EntireSeries, polynomial_ensemble

BOUNDARY_BAND = 0.05
# |lam| exactly BOUNDARY_BAND away from the boundary counts as outside the
# band even after rounding in abs()
BAND_SLACK = 1e-12


@dataclass(frozen=True)
class Membership:
    """Whether ``exp(lam z)`` lies in F_(m,p).

    ``member`` is the analytic answer. ``numeric`` is the verdict of the
    radial quadrature along the direction of fastest growth, or ``None``
    inside the boundary band where no numerical verdict is attempted.
    """

    member: bool
    boundary: bool
    numeric: bool | None

    def __bool__(self):
        return self.member


def _analytic_membership(m, lam_abs):
    if m > 1:
        return True
    if m == 1:
        return lam_abs < 1
    return lam_abs == 0


def _numeric_membership(m, p, lam_abs):
    """Converges iff the last octave of ``int_0^R exp(p(|lam| r - r^m)) r dr``
    carries a negligible share of the total."""
    if m > 1:
        r_star = lam_abs ** (1.0 / (m - 1.0)) if lam_abs > 0 else 1.0
        R = max(50.0, 20.0 * r_star)
    elif m == 1:
        R = 50.0 + 80.0 / (p * abs(1.0 - lam_abs))
    elif lam_abs == 0:
        R = 50.0 ** (1.0 / m)
    else:
        log_r_star = -math.log(lam_abs) / (1.0 - m)
        if log_r_star > 600:
            return None
        R = 20.0 * math.exp(log_r_star)
    u = np.linspace(math.log(1e-6), math.log(R), 20001)
    r = np.exp(u)
    h = p * (lam_abs * r - r ** m) + 2.0 * u
    cut = np.searchsorted(u, math.log(R / 2.0))
    total = logsumexp(h)
    head = logsumexp(h[:cut])
    return bool(-math.expm1(head - total) < 1e-6)


def exp_membership(m: float, p: float, lam: complex) -> Membership:
    if not (m > 0 and math.isfinite(m)):
        raise ValueError("m must be positive")
    if not (p > 0 and math.isfinite(p)):
        raise ValueError("p must be positive and finite")
    a = abs(complex(lam))
    member = _analytic_membership(m, a)
    if m == 1:
        boundary = abs(a - 1.0) < BOUNDARY_BAND - BAND_SLACK
    elif m < 1:
        boundary = 0 < a < BOUNDARY_BAND - BAND_SLACK
    else:
        boundary = False
    numeric = None if boundary else _numeric_membership(m, p, a)
    return Membership(member, boundary, numeric)


class SpectrumKind(enum.Enum):
    POINT_ZERO = "POINT_ZERO"
    CLOSED_UNIT_DISK = "CLOSED_UNIT_DISK"
    UNBOUNDED_OPERATOR = "UNBOUNDED_OPERATOR"


@dataclass(frozen=True)
class SpectrumDescriptor:
    kind: SpectrumKind
    m: float
    p: float

    def contains(self, lam: complex) -> bool:
        if self.kind is SpectrumKind.POINT_ZERO:
            return lam == 0
        if self.kind is SpectrumKind.CLOSED_UNIT_DISK:
            return abs(lam) <= 1
        raise ValueError("D is unbounded for m > 1; no spectrum is computed")


def spectrum_of_D(m: float, p: float) -> SpectrumDescriptor:
    if not (m > 0 and math.isfinite(m)):
        raise ValueError("m must be positive")
    if not (1 <= p < math.inf):
        raise ValueError("the spectrum is described for 1 <= p < inf")
    if m < 1:
        kind = SpectrumKind.POINT_ZERO
    elif m == 1:
        kind = SpectrumKind.CLOSED_UNIT_DISK
    else:
        kind = SpectrumKind.UNBOUNDED_OPERATOR
    return SpectrumDescriptor(kind, float(m), float(p))


def resolvent_apply(lam: complex, h: EntireSeries, f0: complex | None = None) -> EntireSeries:
    """Solve ``lam f - f' = h`` for ``f`` as a series of degree ``deg h + 1``.

    With ``f0`` given, the forward recurrence ``a_0 = f0``,
    ``a_(k+1) = (lam a_k - b_k)/(k+1)`` is used; unless ``f0`` matches the
    polynomial solution, the result is a truncation of an entire function
    containing a multiple of ``exp(lam z)``.

    With ``f0=None`` the unique polynomial solution
    ``f = sum_k h^(k) / lam^(k+1)`` is returned (by the backward recurrence
    ``c_k = (b_k + (k+1) c_(k+1)) / lam``), i.e. the solution without an
    ``exp(lam z)`` component. This needs ``lam != 0``.
    """
    lam = complex(lam)
    b = h.coeffs
    N = b.size - 1
    a = np.zeros(N + 2, dtype=complex)
    if f0 is None:
        if lam == 0:
            raise ValueError("the polynomial solution needs lam != 0")
        for k in range(N, -1, -1):
            a[k] = (b[k] + (k + 1) * a[k + 1]) / lam
    else:
        a[0] = f0
        for k in range(N + 1):
            a[k + 1] = (lam * a[k] - b[k]) / (k + 1)
    return EntireSeries(a)


def resolvent_residual(lam: complex, h: EntireSeries, f: EntireSeries,
                       relative: bool = False) -> np.ndarray:
    """Coefficients of ``(lam - D) f - h`` on the support of ``h``.

    With ``relative`` each coefficient is divided by
    ``|lam a_k| + (k+1)|a_(k+1)| + |b_k|``, the size of the terms that cancel
    in it. The polynomial solution has coefficients growing like
    ``k!/lam^k``, so only this componentwise measure is scale free.
    """
    a = np.zeros(max(f.coeffs.size, h.coeffs.size + 1), dtype=complex)
    a[: f.coeffs.size] = f.coeffs
    n = h.coeffs.size
    k = np.arange(n)
    lam = complex(lam)
    res = lam * a[:n] - (k + 1) * a[1: n + 1] - h.coeffs
    if not relative:
        return res
    scale = np.abs(lam * a[:n]) + (k + 1) * np.abs(a[1: n + 1]) + np.abs(h.coeffs)
    return np.divide(np.abs(res), scale, out=np.zeros(n), where=scale > 0)


@dataclass(frozen=True)
class RatioStats:
    max_ratio: float
    mean_ratio: float
    count: int


def resolvent_norm_ratio(m: float, p: float, lam: complex, ensemble_seed: int, count: int,
                         max_degree: int = 30, rel_tol: float = 1e-10) -> RatioStats:
    """``||R_lam h|| / ||h||`` over a seeded ensemble of random polynomials.

    ``R_lam h`` is the polynomial solution of ``lam f - f' = h`` (see
    ``resolvent_apply``); both norms come from ``series_norm``.
    """
    params = WeightParams(m, p)
    ratios = []
    for h in polynomial_ensemble(ensemble_seed, count, 0, max_degree):
        if h.is_zero():
            continue
        f = resolvent_apply(lam, h)
        ratios.append(math.exp(series_norm(params, f, rel_tol).log_value
                               - series_norm(params, h, rel_tol).log_value))
    return RatioStats(max(ratios), float(np.mean(ratios)), len(ratios))


def lemma2_ratio(p: float, lam: complex, f: EntireSeries, rel_tol: float = 1e-10) -> float:
    """``int |f e^(lam z)|^p e^(-p|z|) dA  /  int |f' e^(lam z)|^p e^(-p|z|) dA``.

    The exponential factor enters the integrand exactly rather than through a
    truncated product series. Returns ``inf`` for constant ``f``.
    """
    lam = complex(lam)
    if abs(lam) >= 1:
        raise ValueError("f exp(lam z) is outside F_(1,p) for |lam| >= 1")
    if f.is_zero():
        raise ValueError("lemma2_ratio needs a nonzero f")
    df = f.derivative()
    if df.is_zero():
        return math.inf
    num = log_plane_integral(f, 1.0, p, rel_tol, lam=lam)
    den = log_plane_integral(df, 1.0, p, rel_tol, lam=lam)
    return math.exp(num - den)


def lemma2_ceiling(p: float, lam: complex, seed: int, count: int, min_degree: int = 4,
                   max_degree: int = 20, rel_tol: float = 1e-8) -> RatioStats:
    ratios = [lemma2_ratio(p, lam, f, rel_tol)
              for f in polynomial_ensemble(seed, count, min_degree, max_degree)]
    return RatioStats(max(ratios), float(np.mean(ratios)), len(ratios))
