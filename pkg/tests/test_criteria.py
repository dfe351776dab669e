import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from focklab.criteria import (BOUNDARY_EPS, Clause, classify, empirical_crosscheck, norm_estimate,
                              threshold)


def grid():
    """10^4 triples on (0, 2.5] x (0.25, 8]^2; the p and q axes share their
    points so that both clauses and the diagonal p = q are populated."""
    ms = np.linspace(0.1, 2.5, 25)
    pq = np.linspace(0.3, 8.0, 20)
    return list(itertools.product(ms, pq, pq))


class TestExamples:
    def test_m1_p2_q2(self):
        v = classify(1, 2, 2)
        assert v.threshold == 1
        assert v.bounded and not v.compact
        assert v.clause is Clause.P_LE_Q and v.at_boundary

    def test_m12_p2_q4(self):
        v = classify(Fraction(6, 5), 2, 4)
        assert v.threshold == pytest.approx(1.2)
        assert v.bounded and not v.compact

    def test_m12_float_inputs_land_on_boundary(self):
        v = classify(1.2, 2.0, 4.0)
        assert v.at_boundary and v.bounded and not v.compact

    def test_m_half_p4_q2(self):
        v = classify(Fraction(1, 2), 4, 2)
        assert v.threshold == 0.5
        assert not v.bounded and not v.compact
        assert v.clause is Clause.Q_LT_P

    def test_threshold_formulas(self):
        assert threshold(2, 4) == (Fraction(6, 5), Clause.P_LE_Q)
        assert threshold(4, 2) == (Fraction(1, 2), Clause.Q_LT_P)
        thr, clause = threshold(1.5, 3.0)
        assert thr == pytest.approx(2 - 4.5 / (4.5 + 1.5)) and clause is Clause.P_LE_Q

    def test_outside_hypotheses_still_classified(self):
        assert classify(3, 1, 1).clause is Clause.P_LE_Q
        assert not classify(3, 1, 1).bounded

    @pytest.mark.parametrize("bad", [(0, 1, 1), (1, -1, 1), (1, 1, math.inf), (1, math.nan, 1)])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            classify(*bad)

    def test_rejects_bool(self):
        with pytest.raises(TypeError):
            classify(True, 2, 2)


class TestGridLaws:
    def test_grid_size(self):
        assert len(grid()) == 10_000

    def test_compact_implies_bounded_and_q_lt_p_equivalence(self):
        for m, p, q in grid():
            v = classify(m, p, q)
            assert not v.compact or v.bounded
            assert (v.clause is Clause.P_LE_Q) == (p <= q)
            if q < p:
                assert v.bounded == v.compact

    def test_boundary_law_exact(self):
        for p, q in itertools.product(range(1, 9), repeat=2):
            thr, _ = threshold(p, q)
            if thr <= 0:
                continue
            v = classify(thr, p, q)
            assert v.at_boundary
            if p <= q:
                assert v.bounded and not v.compact
            else:
                assert not v.bounded

    def test_boundary_band_is_documented_epsilon(self):
        thr = 2 - 8 / 10
        assert classify(thr + 0.5 * BOUNDARY_EPS, 2.0, 4.0).at_boundary
        assert not classify(thr + 10 * BOUNDARY_EPS, 2.0, 4.0).bounded

    def test_bounded_set_is_interval(self):
        ms = np.linspace(0.05, 2.5, 200)
        for p, q in [(1.0, 1.0), (0.5, 3.0), (2.0, 8.0), (3.0, 1.0)]:
            flags = [classify(m, p, q).bounded for m in ms]
            # once unbounded, never bounded again as m grows
            assert flags == sorted(flags, reverse=True)

    def test_threshold_nondecreasing_in_q(self):
        pq = np.linspace(0.3, 8.0, 40)
        for p in pq:
            thr = [threshold(p, q)[0] for q in pq if q >= p]
            assert all(a <= b + 1e-15 for a, b in zip(thr, thr[1:]))

    @given(st.fractions(Fraction(1, 10), 5), st.fractions(Fraction(1, 4), 8), st.fractions(Fraction(1, 4), 8))
    def test_exact_rational_agrees_with_formula(self, m, p, q):
        v = classify(m, p, q)
        thr = 2 - p * q / (p * q + q - p) if p <= q else 1 - 2 * (1 / q - 1 / p)
        assert v.bounded == (m <= thr if p <= q else m < thr)
        assert v.compact == (m < thr)


class TestNormEstimate:
    @pytest.mark.parametrize("p", [0.5, 1.0, 2.0, 7.0])
    def test_m1(self, p):
        assert norm_estimate(1, p, p) == 1.0

    def test_m_half(self):
        assert norm_estimate(0.5, 2, 2) == pytest.approx(0.25, rel=1e-15)

    def test_m15(self):
        assert norm_estimate(1.5, 2, 2) == math.inf

    def test_rejects_q_lt_p(self):
        with pytest.raises(ValueError):
            norm_estimate(0.5, 4, 2)

    def test_finite_iff_bounded_on_grid(self):
        for m, p, q in grid():
            if p <= q:
                assert math.isfinite(norm_estimate(m, p, q)) == classify(m, p, q).bounded

    def test_exponent_sign_matches_threshold(self):
        for m, p, q in grid():
            if p <= q:
                e = (m - 1) + (q - p) * (m - 2) / (q * p)
                if abs(e) > 1e-9:
                    assert (e <= 0) == classify(m, p, q).bounded


class TestCrosscheck:
    def test_m1(self):
        c = empirical_crosscheck(1, 1000)
        assert c.sup_weight < 1
        assert c.verdict.bounded

    def test_m2(self):
        c = empirical_crosscheck(2, 4000)
        assert c.sup_weight == pytest.approx(math.sqrt(8000), rel=1e-12)
        assert c.argmax == 4000
        assert not c.verdict.bounded

    def test_m_half(self):
        c = empirical_crosscheck(Fraction(1, 2), 1000)
        assert c.sup_weight == pytest.approx(4 / math.sqrt(840), rel=1e-12)
        assert c.argmax == 1
        assert c.verdict.bounded and c.verdict.compact

    def test_rejects_small_N(self):
        with pytest.raises(ValueError):
            empirical_crosscheck(1, 999)
