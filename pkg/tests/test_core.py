import math

import pytest
from hypothesis import given, strategies as st

from exact_multinomial import (
    CHISQ,
    LLR,
    PROB_MASS,
    power_divergence,
    validate_counts,
    validate_hypothesis,
)


class TestValidateHypothesis:
    def test_symmetric_case(self):
        hyp = validate_hypothesis((0.5, 0.5), 10)
        assert hyp.n == 10
        assert hyp.m == 2
        assert hyp.pi == (0.5, 0.5)

    def test_sum_not_one(self):
        with pytest.raises(ValueError, match="sum to"):
            validate_hypothesis((0.5, 0.6), 10)

    def test_three_category_null(self):
        hyp = validate_hypothesis((0.2, 0.5, 0.3), 50)
        assert hyp.m == 3
        assert math.fsum(hyp.pi) == pytest.approx(1.0, abs=1e-15)

    def test_negative_entry(self):
        with pytest.raises(ValueError, match="outside"):
            validate_hypothesis((-0.1, 1.1), 5)

    def test_entry_above_one(self):
        with pytest.raises(ValueError, match="outside"):
            validate_hypothesis((1.5, -0.5), 5)

    def test_too_few_categories(self):
        with pytest.raises(ValueError, match="at least 2"):
            validate_hypothesis((1.0,), 5)

    def test_nonpositive_n(self):
        with pytest.raises(ValueError, match="positive"):
            validate_hypothesis((0.5, 0.5), 0)
        with pytest.raises(ValueError, match="positive"):
            validate_hypothesis((0.5, 0.5), -3)

    def test_fractional_n(self):
        with pytest.raises(ValueError, match="integer"):
            validate_hypothesis((0.5, 0.5), 2.5)

    def test_renormalizes_within_tolerance(self):
        # 0.1 + 0.2 + 0.7 is off by one float ulp; output is renormalized.
        hyp = validate_hypothesis((0.1, 0.2, 0.7), 5)
        assert abs(math.fsum(hyp.pi) - 1.0) < 1e-15

    def test_zero_entries_allowed(self):
        hyp = validate_hypothesis((0.0, 0.6, 0.4), 5)
        assert hyp.pi[0] == 0.0

    def test_nan_rejected(self):
        with pytest.raises(ValueError, match="outside"):
            validate_hypothesis((float("nan"), 1.0), 5)


class TestValidateCounts:
    def test_ok(self):
        hyp = validate_hypothesis((0.1, 0.7, 0.2), 50)
        assert validate_counts((4, 40, 6), hyp) == (4, 40, 6)

    def test_wrong_total(self):
        hyp = validate_hypothesis((0.1, 0.7, 0.2), 50)
        with pytest.raises(ValueError, match="sum to 51"):
            validate_counts((4, 40, 7), hyp)

    def test_negative_count(self):
        hyp = validate_hypothesis((0.1, 0.7, 0.2), 50)
        with pytest.raises(ValueError, match="negative"):
            validate_counts((-1, 41, 10), hyp)

    def test_wrong_length(self):
        hyp = validate_hypothesis((0.1, 0.7, 0.2), 50)
        with pytest.raises(ValueError, match="expected 3"):
            validate_counts((25, 25), hyp)

    def test_fractional_count(self):
        hyp = validate_hypothesis((0.5, 0.5), 10)
        with pytest.raises(ValueError, match="integer"):
            validate_counts((4.5, 5.5), hyp)


@given(
    weights=st.lists(st.integers(min_value=0, max_value=50), min_size=2, max_size=6).filter(
        lambda w: sum(w) > 0
    ),
    n=st.integers(min_value=1, max_value=40),
    data=st.data(),
)
def test_validation_round_trip(weights, n, data):
    # Valid inputs pass through unchanged; revalidation is the identity.
    total = sum(weights)
    pi = tuple(w / total for w in weights)
    hyp = validate_hypothesis(pi, n)
    assert validate_hypothesis(hyp.pi, hyp.n) == hyp
    counts = []
    remaining = n
    for _ in range(len(weights) - 1):
        c = data.draw(st.integers(min_value=0, max_value=remaining))
        counts.append(c)
        remaining -= c
    counts.append(remaining)
    x = validate_counts(counts, hyp)
    assert validate_counts(x, hyp) == x == tuple(counts)


class TestStatisticKind:
    def test_labels(self):
        assert PROB_MASS.label == "prob-mass"
        assert CHISQ.label == "chisq"
        assert LLR.label == "llr"
        assert power_divergence(1.5).label == "pd(1.5)"

    def test_constants_are_power_divergences(self):
        assert CHISQ == power_divergence(1)
        assert LLR == power_divergence(0)

    def test_hashable(self):
        assert {PROB_MASS: 1, power_divergence(1.0): 2}[CHISQ] == 2

    def test_lambda_validation(self):
        with pytest.raises(ValueError, match="> -1"):
            power_divergence(-1.0)
        with pytest.raises(ValueError, match="> -1"):
            power_divergence(-2.0)
        with pytest.raises(ValueError, match="finite"):
            power_divergence(float("inf"))
