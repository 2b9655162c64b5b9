import math

import numpy as np
import pytest

from exact_multinomial import (
    CHISQ,
    LLR,
    PROB_MASS,
    continuous_log_pmf_at_expectation,
    continuous_statistic,
    evaluate,
    gap_bound,
    log_pmf,
    nearest_lattice_point,
    power_divergence,
    validate_hypothesis,
)
from conftest import random_lattice_point, random_positive_hypothesis

# Reference values computed once with 60-digit arithmetic from the pmf formula.
LOG_PMF_4_40_6 = -4.734143409472490116405531
LOG_PMF_BAR_AT_MEAN_50 = -3.641240594938487133309158

HYP_FIG = validate_hypothesis((0.1, 0.7, 0.2), 50)


class TestLogPmf:
    def test_two_point_cases(self):
        hyp = validate_hypothesis((0.5, 0.5), 2)
        assert log_pmf((1, 1), hyp) == pytest.approx(math.log(0.5), abs=1e-14)
        assert log_pmf((2, 0), hyp) == pytest.approx(math.log(0.25), abs=1e-14)

    def test_high_precision_reference(self):
        assert log_pmf((4, 40, 6), HYP_FIG) == pytest.approx(LOG_PMF_4_40_6, abs=1e-12)

    def test_impossible_outcome_is_minus_inf(self):
        hyp = validate_hypothesis((0.0, 0.6, 0.4), 10)
        assert log_pmf((1, 5, 4), hyp) == -math.inf

    def test_zero_count_in_zero_probability_category(self):
        hyp = validate_hypothesis((0.0, 0.6, 0.4), 10)
        reduced = validate_hypothesis((0.6, 0.4), 10)
        assert log_pmf((0, 6, 4), hyp) == pytest.approx(log_pmf((6, 4), reduced), abs=1e-13)


class TestContinuousLogPmfAtExpectation:
    def test_closed_form_n2(self):
        hyp = validate_hypothesis((0.5, 0.5), 2)
        assert continuous_log_pmf_at_expectation(hyp) == pytest.approx(-math.log(2.0), abs=1e-14)

    def test_high_precision_reference(self):
        assert continuous_log_pmf_at_expectation(HYP_FIG) == pytest.approx(
            LOG_PMF_BAR_AT_MEAN_50, abs=1e-12
        )

    def test_zero_probability_rejected(self):
        hyp = validate_hypothesis((0.0, 0.6, 0.4), 10)
        with pytest.raises(ValueError, match="> 0"):
            continuous_log_pmf_at_expectation(hyp)


class TestEvaluate:
    def test_chisq_vanishes_at_expectation(self):
        assert evaluate(CHISQ, (5, 35, 10), HYP_FIG) == pytest.approx(0.0, abs=1e-12)

    def test_chisq_direct_arithmetic(self):
        # (4-5)^2/5 + (40-35)^2/35 + (6-10)^2/10
        expected = 1 / 5 + 25 / 35 + 16 / 10
        assert evaluate(CHISQ, (4, 40, 6), HYP_FIG) == pytest.approx(expected, rel=1e-12)

    def test_prob_mass_vanishes_at_integral_expectation(self):
        assert evaluate(PROB_MASS, (5, 35, 10), HYP_FIG) == pytest.approx(0.0, abs=1e-12)

    def test_llr_direct_arithmetic(self):
        expected = 2 * (4 * math.log(4 / 5) + 40 * math.log(8 / 7) + 6 * math.log(3 / 5))
        assert evaluate(LLR, (4, 40, 6), HYP_FIG) == pytest.approx(expected, rel=1e-12)

    def test_unsupported_lambda(self):
        with pytest.raises(ValueError, match="> -1"):
            evaluate(power_divergence(-1.0), (4, 40, 6), HYP_FIG)

    def test_impossible_outcome_infinite_for_all_kinds(self):
        hyp = validate_hypothesis((0.0, 0.6, 0.4), 10)
        for stat in (PROB_MASS, CHISQ, LLR, power_divergence(1.5), power_divergence(-0.5)):
            assert evaluate(stat, (1, 5, 4), hyp) == math.inf

    def test_zero_count_zero_probability_contributes_nothing(self):
        hyp = validate_hypothesis((0.0, 0.6, 0.4), 10)
        reduced = validate_hypothesis((0.6, 0.4), 10)
        for stat in (CHISQ, LLR, power_divergence(1.5)):
            assert evaluate(stat, (0, 6, 4), hyp) == pytest.approx(
                evaluate(stat, (6, 4), reduced), abs=1e-12
            )

    def test_two_chisq_forms_agree(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            n = int(rng.integers(2, 60))
            m = int(rng.integers(2, 6))
            hyp = random_positive_hypothesis(rng, n, m)
            x = random_lattice_point(rng, n, m)
            direct = math.fsum(c * c / (n * p) for c, p in zip(x, hyp.pi)) - n
            value = evaluate(CHISQ, x, hyp)
            assert value == pytest.approx(direct, rel=1e-9, abs=1e-9)

    def test_lambda_continuity_at_zero(self):
        from exact_multinomial import sample_multinomial

        rng = np.random.default_rng(6)
        near_zero = power_divergence(1e-6)
        for _ in range(100):
            n = int(rng.integers(2, 50))
            m = int(rng.integers(2, 5))
            hyp = random_positive_hypothesis(rng, n, m)
            x = sample_multinomial(rng, hyp)
            assert evaluate(near_zero, x, hyp) == pytest.approx(
                evaluate(LLR, x, hyp), abs=1e-4
            )

    def test_nonnegativity(self):
        rng = np.random.default_rng(7)
        stats = (PROB_MASS, CHISQ, LLR, power_divergence(1.5))
        for _ in range(150):
            n = int(rng.integers(2, 40))
            m = int(rng.integers(2, 5))
            hyp = random_positive_hypothesis(rng, n, m)
            x = random_lattice_point(rng, n, m)
            for stat in stats:
                assert evaluate(stat, x, hyp) >= -1e-10

    def test_prob_mass_zero_iff_at_integral_expectation(self):
        hyp = validate_hypothesis((0.1, 0.7, 0.2), 10)  # n*pi = (1, 7, 2)
        assert evaluate(PROB_MASS, (1, 7, 2), hyp) == pytest.approx(0.0, abs=1e-12)
        for x in ((2, 6, 2), (1, 6, 3), (0, 8, 2)):
            assert evaluate(PROB_MASS, x, hyp) > 1e-3


class TestWeakQuasiMConvexity:
    @staticmethod
    def _disjunction_holds(stat, x, y, hyp):
        tx = evaluate(stat, x, hyp)
        ty = evaluate(stat, y, hyp)
        for i in range(hyp.m):
            if x[i] <= y[i]:
                continue
            for j in range(hyp.m):
                if x[j] >= y[j]:
                    continue
                x_step = list(x)
                x_step[i] -= 1
                x_step[j] += 1
                if evaluate(stat, x_step, hyp) <= tx:
                    return True
                y_step = list(y)
                y_step[i] += 1
                y_step[j] -= 1
                if evaluate(stat, y_step, hyp) <= ty:
                    return True
        return False

    def test_exchange_property_spot_check(self):
        rng = np.random.default_rng(8)
        stats = (PROB_MASS, CHISQ, LLR, power_divergence(1.5))
        for _ in range(100):
            hyp = random_positive_hypothesis(rng, 15, 3)
            x = random_lattice_point(rng, 15, 3)
            y = random_lattice_point(rng, 15, 3)
            if x == y:
                continue
            for stat in stats:
                assert self._disjunction_holds(stat, x, y, hyp)


class TestContinuousExtensions:
    def test_matches_discrete_on_lattice_points(self):
        for stat in (PROB_MASS, CHISQ, LLR):
            assert continuous_statistic(stat, (4.0, 40.0, 6.0), HYP_FIG) == evaluate(
                stat, (4, 40, 6), HYP_FIG
            )

    def test_midpoint_convexity(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            n = int(rng.integers(3, 60))
            m = int(rng.integers(2, 5))
            hyp = random_positive_hypothesis(rng, n, m)
            u = rng.dirichlet(np.ones(m)) * n
            v = rng.dirichlet(np.ones(m)) * n
            if (u <= 0).any() or (v <= 0).any():
                continue
            mid = (u + v) / 2.0
            for stat in (PROB_MASS, CHISQ, LLR):
                t_mid = continuous_statistic(stat, mid, hyp)
                t_avg = (continuous_statistic(stat, u, hyp) + continuous_statistic(stat, v, hyp)) / 2.0
                assert t_mid <= t_avg + 1e-9

    def test_input_validation(self):
        with pytest.raises(ValueError, match="sum"):
            continuous_statistic(CHISQ, (1.0, 2.0, 3.0), HYP_FIG)
        with pytest.raises(ValueError, match="nonnegative"):
            continuous_statistic(CHISQ, (-1.0, 41.0, 10.0), HYP_FIG)


class TestGapBound:
    @staticmethod
    def _shifted_gap(x, hyp):
        gap = evaluate(PROB_MASS, x, hyp) - evaluate(LLR, x, hyp)
        shift = math.fsum(
            math.log(c / (hyp.n * p)) for c, p in zip(x, hyp.pi) if c > 0
        )
        return gap - shift

    def test_at_integral_expectation(self):
        bound = gap_bound((5, 35, 10), HYP_FIG)
        assert bound.lower < 0.0 < bound.upper
        assert bound.lower < self._shifted_gap((5, 35, 10), HYP_FIG) < bound.upper

    def test_fig_observation(self):
        bound = gap_bound((4, 40, 6), HYP_FIG)
        assert bound.lower < self._shifted_gap((4, 40, 6), HYP_FIG) < bound.upper

    def test_zero_count_convention(self):
        bound = gap_bound((0, 50, 0), HYP_FIG)
        assert bound.lower < self._shifted_gap((0, 50, 0), HYP_FIG) < bound.upper

    def test_zero_probability_rejected(self):
        hyp = validate_hypothesis((0.0, 0.6, 0.4), 10)
        with pytest.raises(ValueError, match="> 0"):
            gap_bound((0, 6, 4), hyp)

    def test_random_positive_counts(self):
        rng = np.random.default_rng(10)
        for _ in range(300):
            m = int(rng.integers(2, 6))
            n = int(rng.integers(2 * m, 80))
            hyp = random_positive_hypothesis(rng, n, m)
            inner = random_lattice_point(rng, n - m, m)
            x = tuple(c + 1 for c in inner)
            bound = gap_bound(x, hyp)
            assert bound.lower < self._shifted_gap(x, hyp) < bound.upper


def test_canonical_evaluation_is_bitwise_stable():
    # Same point evaluated alone, in a batch, and via the scalar API must agree
    # to the last bit: tie detection depends on it.
    from exact_multinomial.stats import statistic_rows

    rows = np.array([(4, 40, 6), (5, 35, 10), (4, 40, 6)], dtype=np.int64)
    for stat in (PROB_MASS, CHISQ, LLR):
        batch = statistic_rows(stat, rows, HYP_FIG)
        single = statistic_rows(stat, rows[:1], HYP_FIG)
        assert batch[0] == batch[2] == single[0] == evaluate(stat, (4, 40, 6), HYP_FIG)


def test_nearest_lattice_point_statistic_is_small():
    rng = np.random.default_rng(11)
    for _ in range(50):
        hyp = random_positive_hypothesis(rng, int(rng.integers(5, 60)), 3)
        y = nearest_lattice_point(hyp)
        # The nearest point is within one unit transfer of the minimizer, so
        # its chi-square value must be tiny relative to n.
        assert evaluate(CHISQ, y, hyp) <= 3.0 / min(hyp.pi) / hyp.n + 3.0
