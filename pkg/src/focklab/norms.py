"""Norms on the generalized Fock spaces F_(m,p).

``||f||_(m,p)^p = int_C |f(z)|^p exp(-p|z|^m) dA(z)`` for finite ``p`` and
``||f||_(m,inf) = sup_z |f(z)| exp(-|z|^m)``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import gammaln

from focklab.quadrature import log_plane_integral
from focklab.series import EntireSeries, LogMagnitude


@dataclass(frozen=True)
class WeightParams:
    """Weight exponent ``m`` and integrability exponent ``p`` (``inf`` allowed)."""

    m: float
    p: float

    def __post_init__(self):
        if not (math.isfinite(self.m) and self.m > 0):
            raise ValueError(f"weight exponent m must be positive and finite, got {self.m}")
        if not (self.p > 0):
            raise ValueError(f"integrability exponent p must be positive, got {self.p}")

    @property
    def finite(self) -> bool:
        return math.isfinite(self.p)


def _require_finite(params):
    if not params.finite:
        raise ValueError("p = inf is handled by growth_norm only")


def log_monomial_norm_p(m, p, n):
    """``log ||z^n||_(m,p)^p`` (vectorized in ``n``)."""
    n = np.asarray(n, dtype=float)
    if np.any(n < 0):
        raise ValueError("monomial degree must be nonnegative")
    a = (p * n + 2.0) / m
    out = math.log(2.0 * math.pi / m) - a * math.log(p) + gammaln(a)
    return out if np.ndim(out) else float(out)


def monomial_norm(params: WeightParams, n: int) -> LogMagnitude:
    """``||z^n||_(m,p)`` from the closed form.

    Polar coordinates and ``t = p r^m`` give

        ||z^n||^p = (2 pi / m) p^(-(pn+2)/m) Gamma((pn+2)/m),

    evaluated through ``gammaln`` so that large ``n`` does not overflow.
    """
    _require_finite(params)
    if n < 0:
        raise ValueError("monomial degree must be nonnegative")
    return LogMagnitude(log_monomial_norm_p(params.m, params.p, n) / params.p)


def series_norm(params: WeightParams, f: EntireSeries, rel_tol: float = 1e-10) -> LogMagnitude:
    """``||f||_(m,p)`` by radial-angular quadrature.

    Raises ``QuadratureError`` when ``rel_tol`` cannot be met.
    """
    _require_finite(params)
    if f.is_zero():
        return LogMagnitude.zero()
    logI = log_plane_integral(f, params.m, params.p, rel_tol)
    return LogMagnitude(logI / params.p)


def _log_weighted_max_on_circle(f, m, r, K):
    theta = 2.0 * np.pi * np.arange(K) / K
    vals = f.log_abs(r * np.exp(1j * theta))
    j = int(np.argmax(vals))
    return float(vals[j]) - r ** m, theta[j]


def growth_norm(m: float, f: EntireSeries) -> float:
    """``sup_z |f(z)| exp(-|z|^m)`` for a polynomial ``f``.

    The majorant ``sum_k |a_k| r^k exp(-r^m)`` is decreasing once
    ``m r^m > deg f``; the radial search stops beyond that radius as soon as
    the majorant drops under the best value found. Within the search range a
    log-spaced radial grid locates the maximum, which is then polished in
    both ``r`` and ``theta``.
    """
    if not (math.isfinite(m) and m > 0):
        raise ValueError("m must be positive")
    d = f.degree
    if d < 0:
        return 0.0
    a = np.abs(f.coeffs[: d + 1])
    K = max(256, 16 * (d + 1))

    def logF(r, th):
        return float(f.log_abs(r * np.exp(1j * th))) - r ** m

    best, best_r, best_th = math.log(a[0]) if a[0] > 0 else -math.inf, 0.0, 0.0
    r_turn = (d / m) ** (1.0 / m) if d > 0 else 0.0

    def log_majorant(r):
        k = np.arange(d + 1)
        with np.errstate(divide="ignore"):
            return float(np.logaddexp.reduce(np.log(a) + k * math.log(r))) - r ** m

    # scan [0, R]; beyond r_turn the majorant decreases, so once it drops
    # under the best value found nothing further out can beat it
    R = max(2.0 * r_turn, 1.0)
    while True:
        for r in np.geomspace(1e-4, R, 600):
            v, th = _log_weighted_max_on_circle(f, m, r, K)
            if v > best:
                best, best_r, best_th = v, r, th
        if log_majorant(R) < best:
            break
        R *= 2.0

    if best_r > 0:
        lo, hi = best_r * 0.98, best_r * 1.02
        for _ in range(3):
            res = minimize_scalar(lambda r: -logF(r, best_th), bounds=(lo, hi), method="bounded",
                                  options={"xatol": 1e-12 * max(1.0, best_r)})
            if -res.fun > best:
                best, best_r = -res.fun, res.x
            dth = 2.0 * np.pi / K
            res = minimize_scalar(lambda th: -logF(best_r, th), bounds=(best_th - dth, best_th + dth),
                                  method="bounded", options={"xatol": 1e-12})
            if -res.fun > best:
                best, best_th = -res.fun, res.x
            lo, hi = best_r * (1 - 1e-3), best_r * (1 + 1e-3)
    return math.exp(best)


def _lp_log_numerator(params, f, rel_tol):
    m, p = params.m, params.p
    df = f.derivative()
    logs = []
    f0 = abs(f.coeffs[0])
    if f0 > 0:
        logs.append(p * math.log(f0))
    if not df.is_zero():
        c = -p * (m - 1.0)

        def log_radial(r):
            return c * np.log1p(r)

        power = max(c, 0.0)
        logs.append(log_plane_integral(df, m, p, rel_tol, log_radial=log_radial,
                                       radial_power=power, radial_const=2.0 ** power))
    return float(np.logaddexp.reduce(logs))


def lp_ratio(params: WeightParams, f: EntireSeries, rel_tol: float = 1e-10) -> float:
    """Ratio of the derivative-side expression to ``||f||_(m,p)^p``.

    The derivative side is
    ``|f(0)|^p + int |f'(z)|^p exp(-p|z|^m) (1+|z|)^(-p(m-1)) dA(z)``.
    Norm equivalence means this ratio stays within fixed positive bounds
    over the whole space; the raw value is returned, without normalization.
    """
    _require_finite(params)
    if f.is_zero():
        raise ValueError("lp_ratio is undefined for the zero function")
    den = log_plane_integral(f, params.m, params.p, rel_tol)
    return math.exp(_lp_log_numerator(params, f, rel_tol) - den)

