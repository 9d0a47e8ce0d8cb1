"""Closed-form bound evaluators: frozen values, gates, and inequality chains."""

import math

import numpy as np
import pytest

from gridutil import haar_basis, random_spectrum
from projlab import bounds
from projlab.errors import InvalidInputError, OutOfHypothesisError
from projlab.linalg import OrthoProjection, proj_diff_norms, trace_form

INF = float("inf")
SPECTRUM = [2.0, 1.0, 0.0, 0.0]


class TestProp1Y:
    def test_frozen_example(self):
        rep = bounds.prop1_Y(SPECTRUM, 4, 1, 0.5)
        assert rep.I_prime == pytest.approx(4.0)
        assert rep.II_prime == pytest.approx(4.0 / 3.0)
        # max(4*sqrt(1*1)*(2/2)*0.5, 8*1*(4/4)*0.25) = max(2, 2)
        assert rep.III_prime == pytest.approx(2.0)
        assert rep.Y == pytest.approx(4.0 / 3.0)
        assert rep.r_M == 1 and rep.delta_r == pytest.approx(1.0)

    def test_tie_gate(self):
        rep = bounds.prop1_Y([2.0, 2.0, 1.0], 3, 1, 0.5)
        assert rep.II_prime == INF
        assert math.isfinite(rep.III_prime)

    def test_rank_deficient_gate(self):
        rep = bounds.prop1_Y([2.0, 0.0, 0.0], 3, 2, 0.5)
        assert rep.III_prime == INF
        assert rep.II_prime == INF  # lambda_2 = lambda_3 = 0 is also a tie
        assert rep.Y == rep.I_prime

    def test_zero_signal(self):
        rep = bounds.prop1_Y(np.zeros(4), 4, 1, 2.0)
        assert rep.I_prime == 0.0 and rep.Y == 0.0

    def test_monotone_in_sigma1_and_lambda1(self):
        base = np.array([3.0, 2.0, 1.0, 0.5])
        for s1, s2 in [(0.1, 0.5), (0.5, 2.0)]:
            lo = bounds.prop1_Y(base, 4, 2, s1)
            hi = bounds.prop1_Y(base, 4, 2, s2)
            for name in ("I_prime", "II_prime", "III_prime", "Y"):
                assert getattr(lo, name) <= getattr(hi, name)
        bumped = base.copy()
        bumped[0] = 5.0
        lo = bounds.prop1_Y(base, 4, 2, 1.0)
        hi = bounds.prop1_Y(bumped, 4, 2, 1.0)
        for name in ("I_prime", "II_prime", "III_prime", "Y"):
            assert getattr(lo, name) <= getattr(hi, name)

    def test_invalid_inputs(self):
        with pytest.raises(InvalidInputError):
            bounds.prop1_Y(SPECTRUM, 4, 4, 0.5)
        with pytest.raises(InvalidInputError):
            bounds.prop1_Y(SPECTRUM, 4, 0, 0.5)
        with pytest.raises(InvalidInputError):
            bounds.prop1_Y(SPECTRUM, 4, 1, -0.1)
        with pytest.raises(InvalidInputError):
            bounds.prop1_Y([1.0, 2.0], 2, 1, 0.5)  # increasing


class TestThm3Bound:
    def test_frozen_example(self):
        rep = bounds.thm3_bound(SPECTRUM, 4, 1, 1.0, 3.0)
        a = 1.0 + math.sqrt(3.0)
        b = 1.0 + 3.0 ** 0.25
        assert rep.I == pytest.approx(a + b)  # lambda1/sqrt(M) = 1
        assert rep.II == pytest.approx(4.0 / 3.0 * a)
        assert rep.III == pytest.approx(a + b / math.sqrt(3.0))
        assert rep.thm3_value == pytest.approx(3.0 * rep.II)
        assert rep.thm3_value == pytest.approx(10.928203230275509)

    def test_tie_drops_ii(self):
        rep = bounds.thm3_bound([2.0, 2.0, 1.0, 0.5], 4, 1, 1.0, 3.0)
        assert rep.II == INF
        assert rep.thm3_value == pytest.approx(3.0 * min(rep.I, rep.III))

    def test_zero_signal(self):
        rep = bounds.thm3_bound(np.zeros(4), 4, 1, 1.0, 3.0)
        assert rep.I == pytest.approx(1.0 + math.sqrt(3.0))
        assert rep.II == INF and rep.III == INF
        assert rep.thm3_value == pytest.approx(3.0 * rep.I)

    def test_moment_validation(self):
        with pytest.raises(InvalidInputError):
            bounds.thm3_bound(SPECTRUM, 4, 1, 1.0, 0.5)  # m4 < sigma^4
        with pytest.raises(InvalidInputError):
            bounds.thm3_bound(SPECTRUM, 4, 1, 0.0, 1.0)

    def test_tail_padding_beyond_m(self):
        # 2r > M: delta_r sums zero-padded indices
        rep = bounds.thm3_bound([2.0, 1.0, 0.5], 3, 2, 1.0, 3.0)
        assert rep.delta_r == pytest.approx(0.25)


class TestLatala:
    def test_frozen_example(self):
        assert bounds.latala_rhs(4, 1.0, 3.0) == pytest.approx(4.0 * (1.0 + math.sqrt(3.0)))

    def test_homogeneity(self):
        base = bounds.latala_rhs(7, 1.3, 4.1)
        assert bounds.latala_rhs(7, 4 * 1.3, 16 * 4.1) == pytest.approx(4 * base)
        c = 1.7
        assert bounds.latala_rhs(7, c ** 2 * 1.3, c ** 4 * 4.1) == pytest.approx(c ** 2 * base)

    def test_mc_calibration(self):
        # gaussian M=256: mean sigma1^2 over 100 draws stays below 2x the bound
        rng = np.random.default_rng(99)
        vals = [
            np.linalg.svd(rng.standard_normal((256, 256)), compute_uv=False)[0] ** 2
            for _ in range(100)
        ]
        assert np.mean(vals) <= 2.0 * bounds.latala_rhs(256, 1.0, 3.0)

    def test_validation(self):
        with pytest.raises(InvalidInputError):
            bounds.latala_rhs(0, 1.0, 3.0)
        with pytest.raises(InvalidInputError):
            bounds.latala_rhs(4, 1.0, 0.9)


class TestThm1Gaussian:
    def test_frozen_example(self):
        assert bounds.thm1_gaussian_bound(SPECTRUM, 4, 1, 1.0) == pytest.approx(6.0)

    def test_zero_tail_drops_second_term(self):
        # r=2: lambda_3 = lambda_4 = 0 so the tail min vanishes
        value = bounds.thm1_gaussian_bound(SPECTRUM, 4, 2, 1.0)
        assert value == pytest.approx(1.0 * 2 * 4 * (min(4.0, 2.0) + 0.0))

    def test_out_of_hypothesis(self):
        with pytest.raises(OutOfHypothesisError):
            bounds.thm1_gaussian_bound(SPECTRUM, 4, 3, 1.0)  # r > M/2
        with pytest.raises(OutOfHypothesisError):
            bounds.thm1_gaussian_bound([1.0, 0.0, 0.0, 0.0], 4, 2, 1.0)  # rank < r

    def test_tie_uses_tail_branch(self):
        value = bounds.thm1_gaussian_bound([2.0, 1.0, 1.0, 0.5], 4, 2, 1.0)
        assert math.isfinite(value)


class TestGaussianChain:
    def test_frozen_witness(self):
        lhs, rhs = bounds.min_equiv_witness(SPECTRUM, 4, 1, 1.0)
        assert lhs == pytest.approx(1.5)
        assert rhs == pytest.approx(4.0 / 3.0)

    def test_scalar_min_lemma(self):
        # min(a, b + c) <= min(a, b) + c for c >= 0
        assert min(5.0, 1.0 + 2.0) <= min(5.0, 1.0) + 2.0
        rng = np.random.default_rng(1)
        for _ in range(200):
            a, b = rng.standard_normal(2)
            c = abs(rng.standard_normal())
            assert min(a, b + c) <= min(a, b) + c + 1e-12

    def test_chain_termwise_random_spectra(self):
        rng = np.random.default_rng(12)
        for _ in range(1000):
            m = int(rng.integers(2, 17)) * 2
            r = int(rng.integers(1, m // 2 + 1))
            spec = random_spectrum(rng, m)
            sigma = float(10.0 ** rng.uniform(-1, 1))
            ch = bounds.gaussian_min_chain(spec, m, r, sigma)
            tol = 1e-12 * (1.0 + abs(ch.two_min_sum))
            assert ch.two_min_sum <= ch.relaxed_min + tol
            assert ch.relaxed_min <= 2.0 * ch.three_way_min + tol
            assert ch.three_way_min <= ch.regrouped_min + tol
            assert ch.regrouped_min <= ch.two_min_sum + tol
            # both groupings within factor 2 of each other
            assert ch.three_way_min <= ch.two_min_sum + tol
            assert ch.two_min_sum <= 2.0 * ch.three_way_min + tol


class TestLemma1:
    def test_identical_projections_zero(self):
        p = OrthoProjection(np.eye(4)[:, :2])
        a = np.random.default_rng(0).standard_normal((4, 4))
        assert bounds.lemma1_rhs(a, a, p, p) == 0.0
        assert trace_form(a, p.to_matrix() - p.to_matrix(), a) == 0.0

    def test_random_tuples_hold(self):
        rng = np.random.default_rng(44)
        for _ in range(300):
            a = rng.standard_normal((6, 6))
            b = rng.standard_normal((6, 6))
            p1 = OrthoProjection(haar_basis(rng, 6, 2))
            p2 = OrthoProjection(haar_basis(rng, 6, 2))
            lhs = trace_form(a, p2.to_matrix() - p1.to_matrix(), b)
            rhs = bounds.lemma1_rhs(a, b, p1, p2)
            assert lhs <= rhs + 1e-9 * (1.0 + rhs)

    def test_equality_instance_frozen(self):
        a, b, p1, p2 = bounds.lemma1_equality_instance(4, 1, 0.5, 2.0, 3.0)
        lhs = trace_form(a, p1.to_matrix() - p2.to_matrix(), b)
        rhs = bounds.lemma1_rhs(a, b, p1, p2)
        assert lhs == pytest.approx(3.0, rel=1e-12)
        assert rhs == pytest.approx(3.0, rel=1e-10)

    def test_equality_instance_edges(self):
        a, b, p1, p2 = bounds.lemma1_equality_instance(6, 2, 0.0, 1.0, 1.0)
        assert np.allclose(p1.to_matrix(), p2.to_matrix())
        a, b, p1, p2 = bounds.lemma1_equality_instance(6, 2, 1.0, 1.0, 1.0)
        s2, sinf = proj_diff_norms(p1, p2)
        assert s2 == pytest.approx(np.sqrt(4.0))  # alpha sqrt(2r) = sqrt(2*2)
        assert sinf == pytest.approx(1.0)

    def test_validation(self):
        with pytest.raises(InvalidInputError):
            bounds.lemma1_equality_instance(3, 2, 0.5, 1.0, 1.0)  # M < 2r
        with pytest.raises(InvalidInputError):
            bounds.lemma1_equality_instance(4, 1, 1.5, 1.0, 1.0)
        with pytest.raises(InvalidInputError):
            bounds.lemma1_equality_instance(4, 1, 0.5, 0.0, 1.0)


class TestLemma2:
    def test_zero_distance(self):
        rhs_i, _, _ = bounds.lemma2_rhs([2.0, 1.0], 1, 0.0)
        assert rhs_i == 0.0

    def test_frozen_example(self):
        rhs_i, rhs_ii, gate = bounds.lemma2_rhs([2.0, 1.0], 1, math.sqrt(2.0))
        assert rhs_i == pytest.approx(-3.0)
        assert rhs_ii == pytest.approx(-3.0)  # -0.5*4*2 + 1
        assert gate  # sqrt(2) >= sqrt(2)/2

    def test_rank_deficient_sentinel(self):
        rhs_i, rhs_ii, gate = bounds.lemma2_rhs([2.0, 0.0, 0.0], 2, 1.0)
        assert rhs_i == 0.0
        assert rhs_ii == INF
        assert not gate

    def test_negative_distance_rejected(self):
        with pytest.raises(InvalidInputError):
            bounds.lemma2_rhs([2.0, 1.0], 1, -0.5)


class TestSandwich:
    def test_exhaustive_small(self):
        for m in range(2, 129):
            for r in range(1, m):
                assert bounds.sandwich_holds(m, r)


class TestBoundReport:
    def test_merge_and_json(self):
        rep = bounds.thm3_bound([2.0, 2.0, 1.0, 0.5], 4, 1, 1.0, 3.0)
        rep = rep.merged(bounds.prop1_Y([2.0, 2.0, 1.0, 0.5], 4, 1, 0.5))
        d = rep.to_json_dict()
        assert d["II"] == "inf" and d["II_prime"] == "inf"
        assert isinstance(d["I"], float)
        assert "thm1_gaussian" not in d
        assert d["r_M"] == 1

    def test_merge_rejects_mismatch(self):
        a = bounds.thm3_bound(SPECTRUM, 4, 1, 1.0, 3.0)
        b = bounds.prop1_Y(SPECTRUM, 4, 2, 1.0)
        with pytest.raises(InvalidInputError):
            a.merged(b)

    def test_full_report_gaussian(self):
        rep = bounds.full_report(SPECTRUM, 4, 1, 1.0, 3.0, sigma1=0.5, gaussian=True)
        assert rep.thm1_gaussian == pytest.approx(6.0)
        assert rep.Y == pytest.approx(4.0 / 3.0)
        assert rep.latala_rhs == pytest.approx(4.0 * (1.0 + math.sqrt(3.0)))

    def test_full_report_out_of_hypothesis_omits_gaussian(self):
        rep = bounds.full_report([1.0, 0.0, 0.0, 0.0], 4, 2, 1.0, 3.0, gaussian=True)
        assert rep.thm1_gaussian is None
