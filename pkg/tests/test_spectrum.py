import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate
from scipy.special import ive

from focklab.series import EntireSeries, polynomial_ensemble
from focklab.spectrum import (SpectrumKind, exp_membership, lemma2_ceiling, lemma2_ratio,
                              resolvent_apply, resolvent_norm_ratio, resolvent_residual,
                              spectrum_of_D)


class TestMembership:
    def test_examples(self):
        assert exp_membership(1, 2, 0.5)
        assert not exp_membership(1, 2, 1.0)
        assert not exp_membership(0.5, 2, 0.1)

    def test_boundary_band(self):
        v = exp_membership(1, 2, 1.0)
        assert v.boundary and v.numeric is None
        assert exp_membership(1, 2, 0.97).boundary
        assert not exp_membership(1, 2, 0.95).boundary

    @pytest.mark.parametrize("lam,member", [(0.95, True), (1.05, False), (0.0, True), (3.0, False)])
    def test_numeric_agrees_off_boundary_m1(self, lam, member):
        v = exp_membership(1, 2, lam)
        assert v.member == member
        assert v.numeric == member

    @pytest.mark.parametrize("m,lam,member", [(0.5, 0.0, True), (0.5, 0.3, False), (0.8, 2.0, False),
                                              (1.5, 5.0, True), (2.0, 40.0, True)])
    def test_numeric_agrees_other_m(self, m, lam, member):
        v = exp_membership(m, 1.5, lam)
        assert v.member == member and v.numeric == member

    def test_rotation_invariance_100_phases(self):
        rng = np.random.default_rng(9)
        for r in (0.3, 0.95, 1.05, 2.0):
            base = exp_membership(1, 2, r)
            for th in rng.uniform(0, 2 * np.pi, 100):
                v = exp_membership(1, 2, r * np.exp(1j * th))
                assert (v.member, v.boundary, v.numeric) == (base.member, base.boundary, base.numeric)

    def test_rejects(self):
        with pytest.raises(ValueError):
            exp_membership(0, 2, 0.5)
        with pytest.raises(ValueError):
            exp_membership(1, math.inf, 0.5)


class TestSpectrumOfD:
    def test_examples(self):
        assert spectrum_of_D(1, 2).kind is SpectrumKind.CLOSED_UNIT_DISK
        assert spectrum_of_D(0.5, 2).kind is SpectrumKind.POINT_ZERO
        assert spectrum_of_D(2, 2).kind is SpectrumKind.UNBOUNDED_OPERATOR

    def test_rejects_p_below_one(self):
        with pytest.raises(ValueError):
            spectrum_of_D(1, 0.5)

    def test_unbounded_has_no_spectrum(self):
        with pytest.raises(ValueError):
            spectrum_of_D(2, 2).contains(0)

    def test_closure_of_membership_set_m1(self):
        desc = spectrum_of_D(1, 2)
        radii = np.linspace(0, 2, 401)
        members = radii[[exp_membership(1, 2, r).member for r in radii]]
        closure_edge = members.max() + (radii[1] - radii[0])
        for r in radii:
            assert desc.contains(r) == (r <= 1)
        assert closure_edge == pytest.approx(1.0)

    def test_point_zero(self):
        desc = spectrum_of_D(0.5, 3)
        assert desc.contains(0) and not desc.contains(1e-9)


class TestResolventApply:
    def test_constant(self):
        f = resolvent_apply(2, EntireSeries([1]), f0=0.5)
        assert np.array_equal(f.coeffs, [0.5, 0])

    def test_linear(self):
        f = resolvent_apply(2, EntireSeries([0, 1]), f0=0.25)
        assert np.allclose(f.coeffs, [0.25, 0.5, 0], rtol=0, atol=0)

    def test_truncation_grows_by_one(self):
        h = EntireSeries(np.arange(1, 8))
        assert resolvent_apply(1.5, h, f0=0).truncation_degree == h.truncation_degree + 1
        assert resolvent_apply(1.5, h).truncation_degree == h.truncation_degree + 1

    def test_polynomial_solution_needs_nonzero_lambda(self):
        with pytest.raises(ValueError):
            resolvent_apply(0, EntireSeries([1, 1]))

    def test_identity_forward_1000_cases(self):
        # lam uniform on |lam| <= 3; the residual is at rounding level
        # relative to |lam a_k|, which grows like exp(|lam|)
        rng = np.random.default_rng(17)
        worst = 0.0
        for _ in range(1000):
            lam = 3 * math.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
            n = int(rng.integers(1, 31))
            h = EntireSeries(rng.normal(size=n) + 1j * rng.normal(size=n))
            f = resolvent_apply(lam, h, f0=complex(*rng.normal(size=2)))
            worst = max(worst, np.abs(resolvent_residual(lam, h, f)).max())
        assert worst <= 1e-12

    def test_identity_polynomial_solution_relative(self):
        rng = np.random.default_rng(18)
        for _ in range(300):
            lam = complex(*rng.normal(size=2)) * rng.uniform(0.1, 3)
            h = polynomial_ensemble(int(rng.integers(1 << 30)), 1, 0, 30)[0]
            f = resolvent_apply(lam, h)
            assert resolvent_residual(lam, h, f, relative=True).max() <= 1e-14
            # the polynomial solution has no exp(lam z) part: its top
            # coefficient vanishes
            assert f.coeffs[-1] == 0

    @settings(max_examples=50, deadline=None)
    @given(st.complex_numbers(min_magnitude=0.2, max_magnitude=4, allow_nan=False, allow_infinity=False),
           st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                    min_size=1, max_size=12))
    def test_polynomial_solution_matches_derivative_sum(self, lam, b):
        # f = sum_k h^(k) / lam^(k+1)
        h = EntireSeries(b)
        ref = np.zeros(len(b) + 1, dtype=complex)
        g = h
        for k in range(len(b)):
            ref[: g.coeffs.size] += g.coeffs / lam ** (k + 1)
            g = g.derivative()
        got = resolvent_apply(lam, h).coeffs
        assert np.allclose(got, ref, rtol=1e-10, atol=1e-12 * np.abs(ref).max())


class TestResolventRatio:
    def test_finite_and_stable_under_degree_doubling(self):
        a = resolvent_norm_ratio(1, 2, 1.5, 11, 50, max_degree=30)
        b = resolvent_norm_ratio(1, 2, 1.5, 11, 50, max_degree=60)
        assert math.isfinite(a.max_ratio) and math.isfinite(b.max_ratio)
        assert b.max_ratio < 2 * a.max_ratio
        assert a.count == 50

    def test_grows_toward_spectrum(self):
        near = resolvent_norm_ratio(1, 2, 1.05, 11, 50)
        far = resolvent_norm_ratio(1, 2, 2.0, 11, 50)
        assert near.max_ratio >= far.max_ratio

    def test_constant_h_ratio(self):
        # h = 1 gives f = 1/lam exactly
        stats = resolvent_norm_ratio(1, 2, 1.5, 0, 1, max_degree=0)
        assert stats.max_ratio == pytest.approx(1 / 1.5, rel=1e-12)


def tilted_moment_ratio(lam, p):
    """Ratio of int r^(p+1) I_0(p lam r) e^(-p r) dr to int r I_0(p lam r) e^(-p r) dr,
    the angular integral of exp(p lam r cos t) being 2 pi I_0(p lam r)."""
    def moment(k):
        return integrate.quad(lambda r: r ** k * ive(0, p * lam * r) * math.exp(-p * (1 - lam) * r),
                              0, np.inf, epsabs=0, epsrel=1e-12, limit=200)[0]
    return moment(p + 1) / moment(1)


class TestLemma2:
    def test_z_at_zero(self):
        ref = mpmath.quad(lambda r: r ** 3 * mpmath.exp(-2 * r), [0, mpmath.inf]) / \
            mpmath.quad(lambda r: r * mpmath.exp(-2 * r), [0, mpmath.inf])
        assert float(ref) == pytest.approx(1.5, rel=1e-15)
        assert lemma2_ratio(2, 0, EntireSeries([0, 1])) == pytest.approx(float(ref), rel=1e-10)

    @pytest.mark.parametrize("lam", [0.3, 0.7, 0.9])
    def test_z_with_real_tilt(self, lam):
        assert lemma2_ratio(2, lam, EntireSeries([0, 1])) == pytest.approx(tilted_moment_ratio(lam, 2), rel=1e-9)

    def test_tilt_phase_invariance_for_monomials(self):
        a = lemma2_ratio(2, 0.6, EntireSeries([0, 0, 1]))
        b = lemma2_ratio(2, 0.6j, EntireSeries([0, 0, 1]))
        assert a == pytest.approx(b, rel=1e-9)

    def test_constant_is_infinite(self):
        assert lemma2_ratio(2, 0.5, EntireSeries([3])) == math.inf

    def test_rejects(self):
        with pytest.raises(ValueError):
            lemma2_ratio(2, 1.0, EntireSeries([0, 1]))
        with pytest.raises(ValueError):
            lemma2_ratio(2, 0.5, EntireSeries([0]))

    def test_ceiling_stable_on_doubling(self):
        small = lemma2_ceiling(2, 0.5, 7, 100)
        big = lemma2_ceiling(2, 0.5, 7, 200)
        assert math.isfinite(big.max_ratio)
        assert big.max_ratio <= 1.10 * small.max_ratio
