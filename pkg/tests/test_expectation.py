import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.special import erfc

from alphabounds.expectation import (
    TailBoundSpec,
    exact_expected_generr,
    expected_generr_bound,
    lemma9_numeric_check,
    leakage_expected_bound,
    tail_to_expectation,
    theorem10_tail_spec,
)
from alphabounds.learning import (
    LearningProblem,
    build_joint,
    constant_learner,
    dataset_space,
    erm_learner,
    gibbs_learner,
)
from alphabounds.measures import FiniteDistribution, sibson_mi


def closed_form_integral(a, b):
    # int_0^inf min(1, 2b exp(-t^2/a^2)) dt, split at the kink
    r = math.sqrt(math.log(2 * b))
    return a * (r + b * math.sqrt(math.pi) * erfc(r))


class TestTail:
    def test_values(self):
        assert tail_to_expectation(TailBoundSpec(0, math.e)) == 0
        assert tail_to_expectation(TailBoundSpec(1, math.e)) == pytest.approx(1.68546765256630055, abs=1e-14)
        assert tail_to_expectation(TailBoundSpec(2, math.e)) == pytest.approx(3.37093530513260110, abs=1e-13)

    def test_strict_and_relaxed(self):
        with pytest.raises(ValueError):
            TailBoundSpec(1, 2.0)
        spec = TailBoundSpec.relaxed(1, 2.0)
        assert spec.b_below_e
        assert tail_to_expectation(spec) > 0
        with pytest.raises(ValueError):
            tail_to_expectation(TailBoundSpec.relaxed(1, 0.4))
        with pytest.raises(ValueError):
            TailBoundSpec(-1, 3)


class TestLemmaCheck:
    @pytest.mark.parametrize("a,b", [(1, math.e), (1, 1e3), (0.1, math.e), (2.5, 50)])
    def test_integral_matches_closed_form_and_is_below(self, a, b):
        integral, bound = lemma9_numeric_check(TailBoundSpec(a, b), 200)
        assert integral == pytest.approx(closed_form_integral(a, b), abs=1e-8)
        assert integral <= bound + 1e-9

    def test_frozen_values(self):
        assert lemma9_numeric_check(TailBoundSpec(1, math.e))[0] == pytest.approx(1.61794973512760936, abs=1e-8)
        assert lemma9_numeric_check(TailBoundSpec(1, 1e3))[0] == pytest.approx(2.92821202682674641, abs=1e-8)

    def test_scaling(self):
        small = lemma9_numeric_check(TailBoundSpec(0.1, math.e))
        big = lemma9_numeric_check(TailBoundSpec(1, math.e))
        assert small[0] == pytest.approx(0.1 * big[0], rel=1e-8)
        assert small[1] == pytest.approx(0.1 * big[1], rel=1e-14)

    def test_resolution_guard(self):
        with pytest.raises(ValueError):
            lemma9_numeric_check(TailBoundSpec(1, math.e), 50)


class TestExpectedBounds:
    def test_leakage_case(self):
        assert expected_generr_bound(2, 0.5, "inf", 0.0) == pytest.approx(0.716557907775461327, abs=1e-14)
        assert leakage_expected_bound(2, 0.0) == pytest.approx(0.716557907775461327, abs=1e-14)
        assert leakage_expected_bound(8, math.log(2)) == pytest.approx(0.400517730664871053, abs=1e-14)
        assert leakage_expected_bound(10**12, 0.5) < 1e-5

    def test_monotone_and_sqrt_n(self):
        # sqrt(c) + 1/(2 sqrt(c)) increases once c = (ln 2 + I)/gamma >= 1/2
        vals = [expected_generr_bound(10, 0.5, 2, i) for i in (1 - math.log(2), 0.5, 1, 5, 50)]
        assert all(b > a for a, b in zip(vals, vals[1:]))
        assert expected_generr_bound(40, 0.5, 3, 0.7) == pytest.approx(expected_generr_bound(10, 0.5, 3, 0.7) / 2)
        assert expected_generr_bound(10, 0.5, 2, math.inf) == math.inf

    def test_substitution_identity(self):
        for n in (1, 6, 100):
            for sigma in (0.25, 0.5, 2):
                for a in (1.1, 1.5, 2, 4, "inf"):
                    for i in (0.0, 0.3, 2.0):
                        spec = theorem10_tail_spec(n, sigma, a, i)
                        assert tail_to_expectation(spec) == pytest.approx(
                            expected_generr_bound(n, sigma, a, i), rel=1e-12
                        )
        # b = 2^(1/gamma - 1) exp(I/gamma) is below e for small information
        assert theorem10_tail_spec(6, 0.5, 2, 0.0).b_below_e
        assert not theorem10_tail_spec(6, 0.5, "inf", 3.0).b_below_e

    def test_rejects_order_one(self):
        with pytest.raises(ValueError):
            expected_generr_bound(6, 0.5, 1, 0.1)

    def test_leakage_consistency(self):
        for n in (1, 6, 50):
            for leak in (0, 0.3, 2):
                assert leakage_expected_bound(n, leak) == pytest.approx(
                    expected_generr_bound(n, 0.5, "inf", leak), rel=1e-12
                )


class TestExactExpectation:
    def test_zero_loss(self):
        prob = LearningProblem(FiniteDistribution([0.3, 0.7]), 4, np.zeros((2, 2)))
        assert exact_expected_generr(prob, erm_learner(prob)) == 0

    def test_constant_learner(self, desk):
        prob, sp = desk
        ln = constant_learner(prob, 0, sp)
        # E|k/6 - 1/2| for k ~ Bin(6, 1/2)
        by_hand = sum(Fraction(math.comb(6, k), 64) * abs(Fraction(k, 6) - Fraction(1, 2)) for k in range(7))
        assert by_hand == Fraction(10, 64)
        assert exact_expected_generr(prob, ln, exact=True) == Fraction(10, 64)
        assert exact_expected_generr(prob, ln) == pytest.approx(10 / 64, abs=1e-16)
        assert 10 / 64 <= leakage_expected_bound(6, 0.0)
        assert leakage_expected_bound(6, 0.0) == pytest.approx(0.413704900944117630, abs=1e-14)

    def test_collapsed_matches_full(self, desk):
        prob, sp = desk
        full = exact_expected_generr(prob, gibbs_learner(prob, 0.5, sp))
        small = exact_expected_generr(prob, gibbs_learner(prob, 0.5, dataset_space(prob, collapse=True)))
        assert small == pytest.approx(full, abs=1e-14)

    def test_theorem10_on_desk(self, desk):
        prob, sp = desk
        for ln in (erm_learner(prob, space=sp), gibbs_learner(prob, 1.0, sp), constant_learner(prob, 1, sp)):
            j = build_joint(prob, ln)
            e = exact_expected_generr(prob, ln)
            for a in (1.5, 2, 4, "inf"):
                assert e <= expected_generr_bound(6, 0.5, a, sibson_mi(j, a))
