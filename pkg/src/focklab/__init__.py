"""Numerical laboratory for the differentiation operator on the
generalized Fock spaces F_(m,p)."""

from focklab.series import EntireSeries, LogMagnitude
from focklab.norms import WeightParams, monomial_norm, series_norm, growth_norm, lp_ratio
from focklab.shift import (
    ShiftSpectrum, shift_weights, truncated_matrix, singular_values,
    schatten_partial, kernel_norms, ToleranceError,
)
from focklab.criteria import Clause, Verdict, classify, norm_estimate, empirical_crosscheck
from focklab.spectrum import (
    SpectrumKind, exp_membership, spectrum_of_D, resolvent_apply,
    resolvent_norm_ratio, lemma2_ratio,
)
from focklab.geometry import (
    CoverageError, CoveringLattice, tau, build_covering, multiplicity, pointwise_ratio,
)
from focklab.quadrature import QuadratureError

__all__ = [
    "EntireSeries", "LogMagnitude", "WeightParams", "monomial_norm", "series_norm",
    "growth_norm", "lp_ratio", "ShiftSpectrum", "shift_weights", "truncated_matrix",
    "singular_values", "schatten_partial", "kernel_norms", "Clause", "Verdict", "classify",
    "norm_estimate", "empirical_crosscheck", "SpectrumKind", "exp_membership",
    "spectrum_of_D", "resolvent_apply", "resolvent_norm_ratio", "lemma2_ratio",
    "CoveringLattice", "tau", "build_covering", "multiplicity", "pointwise_ratio",
    "CoverageError", "QuadratureError", "ToleranceError",
]

__version__ = "0.1.0"
