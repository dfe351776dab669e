"""Log-space quadrature over the plane and over disks.

Plane integrals have the form

    I = int_C |f(z)|^p exp(-p|z|^m) rho(|z|) exp(p Re(lam z)) dA(z)

with ``f`` a polynomial. The radial variable is mapped to ``t = rate * r^m``
so the weight becomes Gamma-like; the ``t`` axis is covered by uniform
Gauss-Legendre panels plus geometrically graded panels at the origin (which
absorb the ``t^(2/m - 1)`` endpoint behaviour), doubled until two successive
estimates agree. The circle is handled by the trapezoid rule, refined ring
by ring where needed; for even integer ``p`` without tilt it is exact.
"""

import math

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gammaincc, gammaln, logsumexp

GL_ORDER = 16
GRADED_LEVELS = 40
KINK_LEVELS = 16
RADIAL_KINK_LEVELS = 6
NEAR_ZERO = 0.02
BREAK_ZERO = 0.25
TAIL_FRACTION = 1e-3
MAX_NODES = 3 * 10 ** 7

_GL_X, _GL_W = leggauss(GL_ORDER)


class QuadratureError(RuntimeError):
    """Raised when a requested tolerance is not met within the panel budget."""


def log_radial_moment(s, m, rate):
    """``log(2 pi int_0^inf r^(s+1) exp(-rate r^m) dr)``.

    Substituting ``t = rate r^m`` gives
    ``(2 pi / m) rate^(-(s+2)/m) Gamma((s+2)/m)``.
    """
    a = (s + 2.0) / m
    return math.log(2.0 * math.pi) - math.log(m) - a * math.log(rate) + gammaln(a)


def log_upper_gamma(a, T):
    """Upper bound for ``log Gamma(a, T)``, the unregularized upper incomplete Gamma."""
    if T > a:
        # t^(a-1) <= T^(a-1) exp((a-1)(t-T)/T) on [T, inf)
        base = (a - 1.0) * math.log(T) - T
        if a > 1.0:
            base -= math.log1p(-(a - 1.0) / T)
        return base
    q = gammaincc(a, T)
    return gammaln(a) + math.log(q) if q > 0 else gammaln(a)


def _panels(T, n, kinks=()):
    """Breakpoints on ``[0, T]``: ``n`` uniform panels, the first one graded
    towards the origin, and geometric grading on both sides of each kink."""
    h = T / n
    graded = h * np.exp2(-np.arange(GRADED_LEVELS, -1, -1, dtype=float))
    parts = [[0.0], graded, h * np.arange(2, n + 1)]
    steps = h * np.exp2(-np.arange(RADIAL_KINK_LEVELS, dtype=float))
    for t in kinks:
        if 0.0 < t < T:
            parts += [[t], t - steps, t + steps]
    b = np.concatenate(parts)
    return np.unique(b[(b >= 0.0) & (b <= T)])


def _angle_rule(args, sub, levels):
    """Composite Gauss-Legendre rule on the circle with breakpoints at the
    angles ``args``, each gap split into ``sub`` panels and graded towards
    both ends."""
    a = np.unique(np.mod(np.asarray(args, dtype=float), 2.0 * math.pi))
    ends = np.append(a, a[0] + 2.0 * math.pi)
    parts = []
    for lo, hi in zip(ends[:-1], ends[1:]):
        h = (hi - lo) / sub
        steps = h * np.exp2(-np.arange(1, levels + 1, dtype=float))
        parts += [lo + h * np.arange(sub + 1), lo + steps, hi - steps]
    return _gl_nodes(np.unique(np.concatenate(parts)))


def _gl_nodes(breaks):
    a, b = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (b - a)
    x = (a + b) * 0.5 + half * _GL_X[None, :]
    w = half * _GL_W[None, :]
    return x.ravel(), w.ravel()


def _even_integer(p):
    return float(p).is_integer() and int(p) % 2 == 0


def log_plane_integral(f, m, p, rel_tol=1e-10, *, log_radial=None, radial_power=0.0,
                       radial_const=1.0, lam=0.0, max_refinements=10):
    """Natural log of the plane integral described in the module docstring.

    Parameters
    ----------
    f : EntireSeries
    m, p : float
        Weight exponent and integrability exponent.
    rel_tol : float
        Target relative error of the integral.
    log_radial : callable, optional
        ``r -> log rho(r)``, vectorized. Must satisfy
        ``rho(r) <= radial_const * r**radial_power`` for ``r >= 1``; that
        bound drives the truncation of the radial axis.
    lam : complex
        Exponential tilt; only ``m == 1`` with ``|lam| < 1`` is supported.

    Returns
    -------
    float
        ``log I`` (``-inf`` for the zero polynomial).
    """
    if not 0 < rel_tol < 1:
        raise ValueError("rel_tol must lie in (0, 1)")
    d = f.degree
    if d < 0:
        return -math.inf
    lam = complex(lam)
    if lam != 0:
        if m != 1 or abs(lam) >= 1:
            raise ValueError("exponential tilt needs m = 1 and |lam| < 1")
        rate = p * (1.0 - abs(lam))
    else:
        rate = float(p)

    s = p * d + max(radial_power, 0.0)
    a_top = (s + 2.0) / m
    exact_angle = lam == 0 and _even_integer(p)
    if exact_angle:
        K0 = max(4, (int(p) // 2) * d + 1)
    else:
        K0 = max(16, 2 * (d + 1) * math.ceil(p))
    log_bound_pref = (p * math.log(f.abs_coeff_sum()) + math.log(radial_const)
                      + math.log(2.0 * math.pi) - math.log(m))

    def tail_bound(T):
        return log_bound_pref - a_top * math.log(rate) + log_upper_gamma(a_top, T)

    # |f|^p is not smooth across zeros of f unless p is an even integer: the
    # radii of the zeros become radial breakpoints, and rings passing close
    # to a zero get a composite angular rule split at the zero's argument
    roots = np.zeros(0, dtype=complex)
    if not _even_integer(p) and d > 0:
        roots = np.roots(f.coeffs[: d + 1][::-1])
        roots = roots[np.abs(roots) > 0]
    kinks = tuple(np.unique(rate * np.abs(roots) ** m))

    def ring_logs(z):
        g = p * f.log_abs(z)
        if lam != 0:
            g = g + p * (lam * z).real
        K = z.shape[1]
        return (logsumexp(g, axis=1) + math.log(2.0 * math.pi / K),
                logsumexp(g[:, ::2], axis=1) + math.log(4.0 * math.pi / K))

    def near_ring_logs(r, level):
        out = np.empty(r.size)
        # breakpoints at every zero whose modulus is within BREAK_ZERO of r
        near = np.abs(r[:, None] - np.abs(roots)[None, :]) < BREAK_ZERO * r[:, None]
        keys = [tuple(np.flatnonzero(row)) for row in near]
        for key in set(keys):
            idx = np.array([i for i, k in enumerate(keys) if k == key])
            # at least 4 panels per gap: with fewer, the grading from the two
            # ends reproduces the next finer grid and refinement stalls
            sub = max(4, math.ceil(K0 / (16 * len(key)))) * 2 ** level
            th, wt = _angle_rule(np.angle(roots[list(key)]), sub, KINK_LEVELS)
            if idx.size * th.size > MAX_NODES:
                raise QuadratureError("quadrature node budget exhausted")
            z = r[idx, None] * np.exp(1j * th)[None, :]
            g = p * f.log_abs(z)
            if lam != 0:
                g = g + p * (lam * z).real
            out[idx] = logsumexp(g + np.log(wt)[None, :], axis=1)
        return out

    def evaluate(T, n):
        level = int(round(math.log2(n / 16)))
        t, w = _gl_nodes(_panels(T, n, kinks))
        r = (t / rate) ** (1.0 / m)
        with np.errstate(divide="ignore"):
            # r dr = r^2 / (m t) dt
            L = 2.0 * np.log(r) - p * r ** m - math.log(m) - np.log(t) + np.log(w)
        if log_radial is not None:
            L = L + log_radial(r)
        if exact_angle:
            if r.size * K0 > MAX_NODES:
                raise QuadratureError("quadrature node budget exhausted")
            A, _ = ring_logs(r[:, None] * np.exp(2j * np.pi * np.arange(K0) / K0)[None, :])
            return float(logsumexp(L + A))
        A = np.empty(r.size)
        near = np.abs(r[:, None] - np.abs(roots)[None, :]) < NEAR_ZERO * r[:, None]
        close_rings = near.any(axis=1)
        if close_rings.any():
            A[close_rings] = near_ring_logs(r[close_rings], level)
        # elsewhere the trapezoid rule converges like exp(-K delta / r) with
        # delta the distance to the nearest zero modulus; each ring starts
        # where that is negligible and is then doubled until the half grid
        # agrees to within the ring's share of the total
        pending = np.flatnonzero(~close_rings)
        Kr = np.full(r.size, K0)
        if roots.size:
            delta = np.abs(r[:, None] - np.abs(roots)[None, :]).min(axis=1)
            with np.errstate(divide="ignore"):
                need = np.ceil(np.log2(np.maximum(1.0, 40.0 * r / (delta * K0))))
            Kr = K0 * np.exp2(np.minimum(need, 30)).astype(np.int64)
        H = np.empty(r.size)
        while pending.size:
            if np.sum(Kr[pending]) > MAX_NODES:
                raise QuadratureError("angular refinement exhausted the node budget")
            for K in np.unique(Kr[pending]):
                idx = pending[Kr[pending] == K]
                A[idx], H[idx] = ring_logs(
                    r[idx, None] * np.exp(2j * np.pi * np.arange(K) / K)[None, :])
            total = logsumexp(L + A)
            # a ring is done when its own relative error is below 0.1 rel_tol
            # (or at rounding level), or when weighted by its share of the
            # total it is below 0.1 rel_tol / (number of rings)
            with np.errstate(invalid="ignore"):
                rel = np.abs(np.expm1(H[pending] - A[pending]))
                rel[H[pending] == A[pending]] = 0.0
                weighted = rel * np.exp(L[pending] + A[pending] - total)
            done = (rel <= max(0.1 * rel_tol, 1e-14)) | (weighted <= 0.1 * rel_tol / r.size)
            pending = pending[~done]
            Kr[pending] *= 2
        return float(logsumexp(L + A))

    def close(x, y):
        return x == y == -math.inf or abs(math.expm1(x - y)) <= rel_tol

    T = max(rate, a_top + 10.0 * math.sqrt(a_top) + 30.0)
    for _ in range(60):
        n = 16
        prev = None
        for _ in range(max_refinements):
            cur = evaluate(T, n)
            if prev is not None and close(cur, prev):
                break
            prev = cur
            n *= 2
        else:
            raise QuadratureError(
                f"plane integral did not reach rel_tol={rel_tol:g} "
                f"(last change {abs(math.expm1(cur - prev)):.3g})")
        if tail_bound(T) <= cur + math.log(TAIL_FRACTION * rel_tol):
            return cur
        T *= 1.5
    raise QuadratureError("could not certify the radial tail")


def log_disk_integral(f, m, p, center, radius, rel_tol=1e-8, max_refinements=8):
    """``log int_{D(center, radius)} |f(w)|^p exp(-p|w|^m) dA(w)`` in polar
    coordinates about ``center``."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    center = complex(center)
    nr, K = 16, 32
    prev = None
    for _ in range(max_refinements):
        xs, ws = leggauss(nr)
        rho = 0.5 * radius * (xs + 1.0)
        wr = 0.5 * radius * ws
        theta = 2.0 * math.pi * np.arange(K) / K
        w = center + rho[:, None] * np.exp(1j * theta)[None, :]
        g = p * f.log_abs(w) - p * np.abs(w) ** m
        L = math.log(2.0 * math.pi / K) + logsumexp(g, axis=1) + np.log(rho)
        cur = float(logsumexp(L, b=wr))
        if prev is not None and (cur == prev == -math.inf or abs(math.expm1(cur - prev)) <= rel_tol):
            return cur
        prev = cur
        nr *= 2
        K *= 2
    raise QuadratureError(f"disk integral did not reach rel_tol={rel_tol:g}")
