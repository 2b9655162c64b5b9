"""Shared domain types and input validation.

Count vectors and probability vectors are plain tuples so they stay cheap,
hashable and immutable; the validators below are the single entry point
through which raw user input becomes one of these tuples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

ProbabilityVector = tuple[float, ...]
CountVector = tuple[int, ...]

#: Absolute tolerance on |sum(pi) - 1| before a probability vector is rejected.
#: Inputs inside the tolerance are renormalized to sum to 1 exactly.
PROB_SUM_TOL = 1e-12


@dataclass(frozen=True)
class Hypothesis:
    """A simple multinomial null hypothesis: ``n`` trials, category probabilities ``pi``.

    Entries of ``pi`` may be zero (needed for forecast-derived nulls); modules
    that require strict positivity check it themselves.
    """

    n: int
    pi: ProbabilityVector

    @property
    def m(self) -> int:
        return len(self.pi)


@dataclass(frozen=True)
class StatisticKind:
    """Selector for a test statistic.

    ``family`` is either ``"prob-mass"`` (a decreasing transform of the null
    probability mass) or ``"power-divergence"`` with parameter ``lam``;
    ``lam = 1`` is Pearson's chi-square and ``lam = 0`` the log-likelihood
    ratio (limit form).
    """

    family: str
    lam: Optional[float] = None

    @property
    def label(self) -> str:
        if self.family == "prob-mass":
            return "prob-mass"
        if self.lam == 1:
            return "chisq"
        if self.lam == 0:
            return "llr"
        return f"pd({self.lam:g})"

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return f"StatisticKind({self.label})"


PROB_MASS = StatisticKind("prob-mass")


def power_divergence(lam: float) -> StatisticKind:
    """Statistic from the power divergence family with parameter ``lam``.

    ``lam`` must be finite and greater than -1; the ``lam = -1`` limit form
    (and anything below) is not supported.
    """
    lam = float(lam)
    if not math.isfinite(lam):
        raise ValueError(f"power divergence parameter must be finite, got {lam!r}")
    if lam <= -1:
        raise ValueError(f"power divergence parameter must be > -1, got {lam!r}")
    return StatisticKind("power-divergence", lam)


CHISQ = power_divergence(1.0)
LLR = power_divergence(0.0)

#: The three statistics computed by default, in reporting order.
DEFAULT_STATISTICS: tuple[StatisticKind, ...] = (PROB_MASS, CHISQ, LLR)


@dataclass(frozen=True)
class TestResult:
    """Outcome of an exact test for one statistic.

    Exactly one of ``exact_p`` / ``below_threshold`` is populated: either the
    exact p-value (guaranteed >= the threshold used for the call) or the flag
    that the p-value is below that threshold.  ``evaluations`` counts the
    lattice points visited to settle this statistic.
    """

    statistic: StatisticKind
    statistic_value: float
    exact_p: Optional[float]
    below_threshold: bool
    asymptotic_p: float
    evaluations: int


def validate_hypothesis(pi: Iterable[float], n: int) -> Hypothesis:
    """Validate a raw probability vector and trial count into a :class:`Hypothesis`.

    Parameters
    ----------
    pi:
        Candidate category probabilities.  Each entry must lie in [0, 1] and
        the entries must sum to 1 within ``PROB_SUM_TOL``; they are then
        renormalized so downstream math sees an exact simplex point.
    n:
        Number of trials, a positive integer.
    """
    entries = [float(v) for v in pi]
    if len(entries) < 2:
        raise ValueError(f"need at least 2 categories, got {len(entries)}")
    for j, v in enumerate(entries):
        if not (0.0 <= v <= 1.0):
            raise ValueError(f"probability for category {j + 1} outside [0, 1]: {v!r}")
    total = math.fsum(entries)
    if abs(total - 1.0) > PROB_SUM_TOL:
        raise ValueError(f"probabilities sum to {total!r}, not 1 (tolerance {PROB_SUM_TOL})")
    if isinstance(n, float) and not n.is_integer():
        raise ValueError(f"trial count must be an integer, got {n!r}")
    n = int(n)
    if n < 1:
        raise ValueError(f"trial count must be positive, got {n}")
    return Hypothesis(n, tuple(v / total for v in entries))


def validate_counts(x: Iterable[int], hyp: Hypothesis) -> CountVector:
    """Validate observed counts against a hypothesis.

    Counts must be nonnegative integers of length ``hyp.m`` summing to
    ``hyp.n``.  Returns the counts as a tuple.
    """
    counts = list(x)
    if len(counts) != hyp.m:
        raise ValueError(f"expected {hyp.m} counts, got {len(counts)}")
    out = []
    for j, c in enumerate(counts):
        if isinstance(c, float):
            if not c.is_integer():
                raise ValueError(f"count for category {j + 1} is not an integer: {c!r}")
            c = int(c)
        c = int(c)
        if c < 0:
            raise ValueError(f"count for category {j + 1} is negative: {c}")
        out.append(c)
    total = sum(out)
    if total != hyp.n:
        raise ValueError(f"counts sum to {total}, expected {hyp.n}")
    return tuple(out)
