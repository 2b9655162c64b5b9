"""Randomized tests of exact size, power functions and region weights.

Randomization places a fractional rejection probability ``gamma`` on the
threshold boundary so the attained size equals the nominal level exactly,
which makes power functions of different statistics directly comparable.
Everything here runs on full enumeration of the sample space and is meant
for small ``n`` and ``m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import Hypothesis, ProbabilityVector, StatisticKind
from .lattice import iter_full_blocks, simplex_size
from .stats import log_pmf_rows, statistic_rows


@dataclass(frozen=True, eq=False)
class RandomizedTest:
    """Critical function of an exact-size randomized test.

    Rejects outright above ``threshold``, never below it, and with
    probability ``gamma`` on the boundary, where ``boundary_mass`` is the
    null probability of hitting the threshold exactly.
    """

    hyp: Hypothesis
    stat: StatisticKind
    alpha: float
    threshold: float
    gamma: float
    boundary_mass: float
    _points: np.ndarray = field(repr=False)
    _values: np.ndarray = field(repr=False)

    def phi(self, x: Sequence[int]) -> float:
        """Rejection probability for the observation ``x``."""
        row = np.asarray(x, dtype=np.int64)[None, :]
        value = float(statistic_rows(self.stat, row, self.hyp)[0])
        if value > self.threshold:
            return 1.0
        if value == self.threshold:
            return self.gamma
        return 0.0

    def _phi_values(self) -> np.ndarray:
        out = np.zeros(self._values.shape[0])
        out[self._values > self.threshold] = 1.0
        out[self._values == self.threshold] = self.gamma
        return out


def build_randomized_test(hyp: Hypothesis, alpha: float, stat: StatisticKind) -> RandomizedTest:
    """Construct the randomized test of exact size ``alpha`` by full enumeration.

    The threshold is the smallest attained statistic value ``t`` with
    P(T > t) <= alpha; the boundary rejection probability is then
    ``(alpha - P(T > t)) / P(T = t)``.
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    if any(p == 0.0 for p in hyp.pi):
        raise ValueError("randomized tests require all category probabilities > 0")
    points = np.concatenate(list(iter_full_blocks(hyp.n, hyp.m)))
    logf = log_pmf_rows(points, hyp)
    f = np.exp(logf)
    values = statistic_rows(stat, points, hyp, logf)

    order = np.argsort(values, kind="stable")
    values_sorted = values[order]
    f_sorted = f[order]
    boundaries = np.flatnonzero(np.diff(values_sorted)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [values_sorted.shape[0]]))
    cumulative = np.cumsum(f_sorted)
    # Smallest attained t with P(T <= t) >= 1 - alpha, refined exactly.
    idx = int(np.searchsorted(cumulative[ends - 1], 1.0 - alpha))
    idx = min(idx, starts.shape[0] - 1)
    while math.fsum(f_sorted[: ends[idx]].tolist()) < 1.0 - alpha and idx + 1 < starts.shape[0]:
        idx += 1
    threshold = float(values_sorted[starts[idx]])
    mass_above = math.fsum(f_sorted[ends[idx] :].tolist())
    boundary_mass = math.fsum(f_sorted[starts[idx] : ends[idx]].tolist())
    # Clamp away up-to-one-ulp excursions from the float division.
    gamma = min(max((alpha - mass_above) / boundary_mass, 0.0), 1.0)
    return RandomizedTest(
        hyp=hyp,
        stat=stat,
        alpha=alpha,
        threshold=threshold,
        gamma=gamma,
        boundary_mass=boundary_mass,
        _points=points,
        _values=values,
    )


def _log_pmf_under(points: np.ndarray, n: int, p: np.ndarray) -> np.ndarray:
    # log pmf of each lattice point under an arbitrary parameter p (zeros allowed).
    from scipy.special import gammaln

    base = math.lgamma(n + 1) - gammaln(points + 1.0).sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        cross = np.where(points > 0, points * np.log(p), 0.0)
    return base + cross.sum(axis=1)


def power(rt: RandomizedTest, p: Iterable[float]) -> float:
    """Rejection probability of the randomized test when the true parameter is ``p``."""
    p_arr = np.asarray(tuple(p), dtype=np.float64)
    if p_arr.shape[0] != rt.hyp.m:
        raise ValueError(f"expected {rt.hyp.m} probabilities, got {p_arr.shape[0]}")
    phi = rt._phi_values()
    mask = phi > 0.0
    if not mask.any():
        return 0.0
    f_p = np.exp(_log_pmf_under(rt._points[mask], rt.hyp.n, p_arr))
    return min(math.fsum((phi[mask] * f_p).tolist()), 1.0)


def line_alternative(pi: ProbabilityVector, axis: int, q: float) -> ProbabilityVector:
    """Point on the line through ``pi`` and the ``axis``-th simplex corner.

    ``axis`` is 1-based.  Coordinate ``axis`` is set to ``q`` and the rest are
    scaled by ``(1 - q) / (1 - pi_axis)``; ``q = pi_axis`` returns ``pi``
    itself and ``q = 1`` the corner.
    """
    m = len(pi)
    if not (1 <= axis <= m):
        raise ValueError(f"axis must lie in 1..{m}, got {axis}")
    if not (0.0 <= q <= 1.0):
        raise ValueError(f"q must lie in [0, 1], got {q!r}")
    i = axis - 1
    if pi[i] == 1.0:
        raise ValueError("the line through a corner null is degenerate")
    scale = (1.0 - q) / (1.0 - pi[i])
    return tuple(q if j == i else scale * pi[j] for j in range(m))


def power_curve(
    hyp: Hypothesis,
    alpha: float,
    stat: StatisticKind,
    axis: int,
    q_grid: Sequence[float],
) -> list[tuple[float, float]]:
    """Power along the simplex line through ``pi`` and the ``axis``-th corner."""
    rt = build_randomized_test(hyp, alpha, stat)
    return [(float(q), power(rt, line_alternative(hyp.pi, axis, q))) for q in q_grid]


def region_weight(rt: RandomizedTest) -> float:
    """Sum of acceptance weights ``1 - phi(x)`` over the whole sample space.

    The probability-mass statistic minimizes this among all exact-size
    randomized tests at the same level.
    """
    below = int(np.count_nonzero(rt._values < rt.threshold))
    boundary = int(np.count_nonzero(rt._values == rt.threshold))
    total = simplex_size(rt.hyp.n, rt.hyp.m)
    assert below + boundary <= total
    return below + (1.0 - rt.gamma) * boundary


def extreme_power_labels(
    powers: Mapping[StatisticKind, float],
    mode: str = "best",
    tol: float = 1e-4,
) -> tuple[str, ...]:
    """Labels of the statistics whose power is within ``tol`` of the extreme.

    ``mode`` selects the highest-power ("best") or lowest-power ("worst")
    comparison; mixtures of labels mark nearly equal powers.
    """
    if mode not in ("best", "worst"):
        raise ValueError(f"mode must be 'best' or 'worst', got {mode!r}")
    if not powers:
        raise ValueError("no powers supplied")
    extreme = max(powers.values()) if mode == "best" else min(powers.values())
    return tuple(sorted(s.label for s, v in powers.items() if abs(v - extreme) < tol))
