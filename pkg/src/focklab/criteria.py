"""Boundedness and compactness of ``D: F_(m,p) -> F_(m,q)``.

For ``p <= q`` the threshold is ``2 - pq/(pq + q - p)``: bounded iff
``m <= threshold``, compact iff ``m < threshold``. For ``q < p`` it is
``1 - 2(1/q - 1/p)`` and bounded, compact and ``m < threshold`` are
equivalent.

Inputs given as ``int`` or ``fractions.Fraction`` are compared exactly;
anything else goes through floats and ``|m - threshold| <= BOUNDARY_EPS``
counts as sitting on the threshold.
"""

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from focklab.shift import shift_weights

BOUNDARY_EPS = 1e-12


class Clause(enum.Enum):
    P_LE_Q = "P_LE_Q"
    Q_LT_P = "Q_LT_P"


@dataclass(frozen=True)
class Verdict:
    m: float
    p: float
    q: float
    threshold: float
    bounded: bool
    compact: bool
    clause: Clause
    at_boundary: bool


def _check(name, x):
    if isinstance(x, bool):
        raise TypeError(f"{name} must be a number")
    if isinstance(x, Rational):
        if x <= 0:
            raise ValueError(f"{name} must be positive, got {x}")
        return
    xf = float(x)
    if not math.isfinite(xf) or xf <= 0:
        raise ValueError(f"{name} must be positive and finite, got {x}")


def _exact(*xs):
    return all(isinstance(x, Rational) for x in xs)


def threshold(p, q):
    """Threshold on ``m`` and the governing clause for the pair ``(p, q)``."""
    if _exact(p, q):
        p, q = Fraction(p), Fraction(q)
        if p <= q:
            return 2 - p * q / (p * q + q - p), Clause.P_LE_Q
        return 1 - 2 * (1 / q - 1 / p), Clause.Q_LT_P
    p, q = float(p), float(q)
    if p <= q:
        return 2.0 - p * q / (p * q + q - p), Clause.P_LE_Q
    return 1.0 - 2.0 * (1.0 / q - 1.0 / p), Clause.Q_LT_P


def _compare(m, thr, exact):
    """-1, 0, +1 for ``m`` below, on, above the threshold."""
    if exact:
        return (m > thr) - (m < thr)
    diff = float(m) - float(thr)
    if abs(diff) <= BOUNDARY_EPS:
        return 0
    return 1 if diff > 0 else -1


def classify(m, p, q) -> Verdict:
    for name, x in (("m", m), ("p", p), ("q", q)):
        _check(name, x)
    thr, clause = threshold(p, q)
    side = _compare(m, thr, _exact(m, p, q))
    if clause is Clause.P_LE_Q:
        bounded, compact = side <= 0, side < 0
    else:
        bounded = compact = side < 0
    return Verdict(float(m), float(p), float(q), float(thr), bounded, compact, clause, side == 0)


def norm_estimate(m, p, q) -> float:
    """Two-sided estimate of ``||D: F_(m,p) -> F_(m,q)||`` up to constants.

    ``1`` when ``m = 1``; otherwise
    ``|m^(2+p) - m^(1+p)|^(1/p) * sup_w (1+|w|)^e`` with
    ``e = (m-1) + (q-p)(m-2)/(qp)``. The supremum is attained at ``w = 0``
    when ``e <= 0`` and is infinite otherwise. The sign of ``e`` is decided by
    the same comparison ``classify`` uses, since ``e <= 0`` is equivalent to
    ``m <= 2 - pq/(pq+q-p)``.
    """
    for name, x in (("m", m), ("p", p), ("q", q)):
        _check(name, x)
    if q < p:
        raise ValueError("the norm estimate is stated for p <= q only")
    if m == 1:
        return 1.0
    if not classify(m, p, q).bounded:
        return math.inf
    mf, pf = float(m), float(p)
    return abs(mf ** (2 + pf) - mf ** (1 + pf)) ** (1.0 / pf)


@dataclass(frozen=True)
class Crosscheck:
    m: float
    N: int
    sup_weight: float
    argmax: int
    verdict: Verdict


def empirical_crosscheck(m, N: int) -> Crosscheck:
    """Largest shift weight up to ``N`` beside the ``p = q = 2`` verdict."""
    if N < 1000:
        raise ValueError("use N >= 1000 for the cross-check")
    spec = shift_weights(float(m), N)
    k = int(spec.log_weights.argmax())
    return Crosscheck(float(m), N, float(spec.weights[k]), k + 1, classify(m, 2, 2))
