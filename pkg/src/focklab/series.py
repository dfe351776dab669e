"""Truncated Taylor series and log-scaled magnitudes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class LogMagnitude:
    """A nonnegative real stored as its natural logarithm.

    Quantities such as ``Gamma((pn+2)/m)`` or ``exp(2|w|^m)`` overflow a
    double long before they become uninteresting, so they travel through
    the package in this form.
    """

    log_value: float
    is_zero: bool = False

    @classmethod
    def from_value(cls, x: float) -> "LogMagnitude":
        if x < 0:
            raise ValueError("magnitude must be nonnegative")
        if x == 0:
            return cls.zero()
        return cls(math.log(x))

    @classmethod
    def zero(cls) -> "LogMagnitude":
        return cls(-math.inf, True)

    @property
    def value(self) -> float:
        """Linear value; may overflow to ``inf``."""
        if self.is_zero:
            return 0.0
        try:
            return math.exp(self.log_value)
        except OverflowError:
            return math.inf

    def __add__(self, other: "LogMagnitude") -> "LogMagnitude":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        return LogMagnitude(float(np.logaddexp(self.log_value, other.log_value)))

    def __mul__(self, other: "LogMagnitude") -> "LogMagnitude":
        if self.is_zero or other.is_zero:
            return LogMagnitude.zero()
        return LogMagnitude(self.log_value + other.log_value)

    def scale(self, c: float) -> "LogMagnitude":
        """Multiply by a nonnegative scalar ``c``."""
        if c < 0:
            raise ValueError("scale factor must be nonnegative")
        if c == 0 or self.is_zero:
            return LogMagnitude.zero()
        return LogMagnitude(self.log_value + math.log(c))

    def power(self, a: float) -> "LogMagnitude":
        if self.is_zero:
            if a <= 0:
                raise ValueError("zero raised to a nonpositive power")
            return self
        return LogMagnitude(a * self.log_value)

    def to_dict(self) -> dict:
        return {"log_value": self.log_value, "is_zero": self.is_zero}


@dataclass(frozen=True, eq=False, init=False)
class EntireSeries:
    """Taylor coefficients ``a_0..a_N`` of an entire function at the origin.

    Every stored coefficient takes part in evaluation, including trailing
    zeros; ``truncation_degree`` is ``N`` regardless of whether ``a_N``
    vanishes.
    """

    coeffs: np.ndarray = field(repr=False)

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=complex).ravel()
        if c.size == 0:
            raise ValueError("an EntireSeries needs at least one coefficient")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def monomial(cls, n: int, c: complex = 1.0) -> "EntireSeries":
        a = np.zeros(n + 1, dtype=complex)
        a[n] = c
        return cls(a)

    @property
    def truncation_degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def degree(self) -> int:
        """Index of the last nonzero coefficient, -1 for the zero series."""
        nz = np.flatnonzero(self.coeffs)
        return int(nz[-1]) if nz.size else -1

    def is_zero(self) -> bool:
        return self.degree < 0

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for a in self.coeffs[::-1]:
            out = out * z + a
        return out

    def log_abs(self, z) -> np.ndarray:
        """``log|f(z)|`` without overflow for large ``|z|``.

        Outside the unit disk the polynomial is rewritten as
        ``z^d * sum_j a_(d-j) z^(-j)`` so every partial sum stays bounded by
        the largest coefficient.
        """
        z = np.asarray(z, dtype=complex)
        d = self.degree
        if d < 0:
            return np.full(z.shape, -np.inf)
        a = self.coeffs[: d + 1]
        r = np.abs(z)
        inner = r <= 1.0
        out = np.empty(z.shape, dtype=float)
        with np.errstate(divide="ignore"):
            if inner.any():
                out[inner] = np.log(np.abs(_horner(a, z[inner])))
            if (~inner).any():
                zo = z[~inner]
                out[~inner] = np.log(np.abs(_horner(a[::-1], 1.0 / zo))) + d * np.log(r[~inner])
        return out

    def derivative(self) -> "EntireSeries":
        """Coefficient shift ``b_k = (k+1) a_(k+1)``."""
        if self.coeffs.size == 1:
            return EntireSeries([0.0])
        k = np.arange(1, self.coeffs.size)
        return EntireSeries(k * self.coeffs[1:])

    def scaled(self, c: complex) -> "EntireSeries":
        return EntireSeries(c * self.coeffs)

    def __add__(self, other: "EntireSeries") -> "EntireSeries":
        n = max(self.coeffs.size, other.coeffs.size)
        a = np.zeros(n, dtype=complex)
        a[: self.coeffs.size] += self.coeffs
        a[: other.coeffs.size] += other.coeffs
        return EntireSeries(a)

    def __mul__(self, other: "EntireSeries") -> "EntireSeries":
        return EntireSeries(np.convolve(self.coeffs, other.coeffs))

    def abs_coeff_sum(self) -> float:
        return float(np.abs(self.coeffs).sum())


def _horner(a, z):
    """``sum_k a[k] z^k``; runs of zero coefficients become a single power."""
    nz = np.flatnonzero(a)
    acc = np.full(z.shape, a[nz[-1]], dtype=complex)
    for hi, lo in zip(nz[::-1], nz[-2::-1]):
        gap = hi - lo
        acc *= z if gap == 1 else z ** gap
        acc += a[lo]
    if nz[0] > 0:
        acc *= z ** nz[0]
    return acc


def random_polynomial(rng: np.random.Generator, min_degree: int, max_degree: int,
                      scales=None) -> EntireSeries:
    """Polynomial with standard complex Gaussian coefficients.

    The degree is drawn uniformly from ``[min_degree, max_degree]``. With
    ``scales`` given, coefficient ``k`` is multiplied by ``scales[k]``. Draws
    are consumed in a fixed order so an ensemble of size ``2n`` starts with
    the ensemble of size ``n`` for the same generator seed.
    """
    d = int(rng.integers(min_degree, max_degree + 1))
    g = rng.standard_normal((max_degree + 1, 2)) @ np.array([1.0, 1.0j]) / math.sqrt(2.0)
    a = g[: d + 1]
    if scales is not None:
        a = a * np.asarray(scales)[: d + 1]
    if not np.any(a):
        a = a.copy()
        a[0] = 1.0
    return EntireSeries(a)


def polynomial_ensemble(seed: int, count: int, min_degree: int, max_degree: int,
                        scales=None) -> list[EntireSeries]:
    rng = np.random.default_rng(seed)
    return [random_polynomial(rng, min_degree, max_degree, scales) for _ in range(count)]
