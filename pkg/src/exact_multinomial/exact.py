"""Exact p-values and acceptance regions for simple multinomial hypotheses.

Two routes are implemented and kept deliberately independent:

* ``p_values_full_enum`` sums the null pmf over the entire discrete simplex
  (the oracle; cost grows like n^(m-1)).
* ``p_value_exact`` walks shells of increasing rescaled-Manhattan radius
  around a central lattice point, accumulating the mass of strictly less
  extreme points, and stops as soon as the shell minimum of the statistic
  proves no further mass can qualify.  Sublevel sets of the supported
  statistics are connected under unit transfers, which is what makes the
  early stop exact.  P-values below the caller's threshold are reported as
  a flag instead of a number.

``acceptance_region`` grows the same ball until the smallest sublevel set
holding at least 1 - alpha of the null mass fits strictly inside the
previous ball, at which point it equals the global acceptance region.

Ties are resolved by exact equality of canonically computed statistic
values; no epsilon band is applied anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .asymptotic import asymptotic_p_lenient
from .core import (
    CountVector,
    DEFAULT_STATISTICS,
    Hypothesis,
    StatisticKind,
    TestResult,
    validate_counts,
)
from .lattice import (
    iter_full_blocks,
    nearest_lattice_point,
    shell_points,
    sparse_upper_bounds,
)
from .stats import log_pmf_rows, statistic_rows
from .summation import CompensatedSum

#: Default p-value threshold below which exact computation is skipped.
DEFAULT_THETA = 1e-4
#: Smallest accepted threshold; float accumulation is reliable above it.
MIN_THETA = 1e-8


@dataclass(frozen=True)
class AcceptanceRegion:
    """Sublevel set of a statistic holding at least ``1 - alpha`` of null mass.

    ``points`` are exactly the lattice points with statistic value at most
    ``threshold`` (ties included); ``mass`` is their total null probability
    and ``test_size = 1 - mass`` the attained size of the deterministic test.
    """

    alpha: float
    statistic: StatisticKind
    points: tuple[CountVector, ...]
    threshold: float
    mass: float
    test_size: float
    evaluations: int


def _statistic_at(stat: StatisticKind, x: CountVector, hyp: Hypothesis) -> float:
    return float(statistic_rows(stat, np.array([x], dtype=np.int64), hyp)[0])


def p_values_full_enum(
    x: Iterable[int],
    hyp: Hypothesis,
    stats: Sequence[StatisticKind] = DEFAULT_STATISTICS,
) -> dict[StatisticKind, float]:
    """Oracle p-values by full enumeration, all statistics in one pass."""
    counts = validate_counts(x, hyp)
    stats = tuple(dict.fromkeys(stats))
    observed = {s: _statistic_at(s, counts, hyp) for s in stats}
    acc = {s: CompensatedSum() for s in stats}
    for block in iter_full_blocks(hyp.n, hyp.m):
        logf = log_pmf_rows(block, hyp)
        f = np.exp(logf)
        for s in stats:
            tz = statistic_rows(s, block, hyp, logf)
            mask = tz >= observed[s]
            if mask.any():
                acc[s].add(float(np.sum(f[mask])))
    return {s: min(acc[s].value, 1.0) for s in stats}


def p_value_full_enum(x: Iterable[int], hyp: Hypothesis, stat: StatisticKind) -> float:
    """Oracle p-value P(T(X) >= T(x)) by summing over the whole simplex."""
    return p_values_full_enum(x, hyp, (stat,))[stat]


def _enumeration_pass(
    center: CountVector,
    observed: Mapping[StatisticKind, float],
    stats: Sequence[StatisticKind],
    hyp: Hypothesis,
    theta: float,
    caps: Optional[Sequence[Optional[int]]],
) -> dict[StatisticKind, tuple[float, bool, int]]:
    """Shell walk shared by all statistics of one pass.

    Returns per statistic: (final accumulated mass below the observed value,
    below-threshold flag, lattice evaluations consumed).
    """
    active = list(stats)
    acc = {s: CompensatedSum() for s in active}
    out: dict[StatisticKind, tuple[float, bool, int]] = {}
    evaluations = 0
    for r in range(hyp.n + 1):
        points = shell_points(center, r, caps)
        if points.shape[0] == 0:
            # Ball exhausted the (possibly capped) simplex: an empty shell has
            # minimum +inf, which satisfies every remaining stop rule.
            break
        evaluations += points.shape[0]
        logf = log_pmf_rows(points, hyp)
        f = np.exp(logf)
        still_active = []
        for s in active:
            tz = statistic_rows(s, points, hyp, logf)
            mask = tz < observed[s]
            if mask.any():
                acc[s].add(float(np.sum(f[mask])))
            stop = (r >= 1 and observed[s] <= float(tz.min())) or acc[s].value > 1.0 - theta
            if stop:
                total = acc[s].value
                out[s] = (total, total > 1.0 - theta, evaluations)
            else:
                still_active.append(s)
        active = still_active
        if not active:
            break
    for s in active:
        total = acc[s].value
        out[s] = (total, total > 1.0 - theta, evaluations)
    return out


def p_value_exact(
    x: Iterable[int],
    hyp: Hypothesis,
    theta: float = DEFAULT_THETA,
    stats: Sequence[StatisticKind] = DEFAULT_STATISTICS,
) -> dict[StatisticKind, TestResult]:
    """Exact p-values above ``theta`` for each requested statistic.

    The enumeration is shared: one ball walk covers every statistic whose
    center is the lattice point nearest the expectation.  If the observation
    itself is at least as central (its statistic value does not exceed the
    center's) for some statistics, those are settled in a second walk around
    the observation.  Results carry either ``exact_p >= theta`` or the
    ``below_threshold`` flag, never both.
    """
    if not (MIN_THETA <= theta < 1.0):
        raise ValueError(f"theta must lie in [{MIN_THETA}, 1), got {theta!r}")
    counts = validate_counts(x, hyp)
    stats = tuple(dict.fromkeys(stats))
    if not stats:
        raise ValueError("at least one statistic is required")

    observed = {s: _statistic_at(s, counts, hyp) for s in stats}
    results: dict[StatisticKind, TestResult] = {}

    finite = [s for s in stats if math.isfinite(observed[s])]
    for s in stats:
        if not math.isfinite(observed[s]):
            # Impossible outcome under the null: the exact p-value is 0.
            results[s] = TestResult(
                statistic=s,
                statistic_value=observed[s],
                exact_p=None,
                below_threshold=True,
                asymptotic_p=asymptotic_p_lenient(s, observed[s], hyp),
                evaluations=0,
            )
    if finite:
        center = nearest_lattice_point(hyp)
        caps = sparse_upper_bounds(hyp, theta)
        center_values = {s: _statistic_at(s, center, hyp) for s in finite}
        recentered = [s for s in finite if observed[s] <= center_values[s]]
        if len(recentered) == len(finite):
            passes = [(counts, finite)]
        elif not recentered:
            passes = [(center, finite)]
        else:
            passes = [
                (center, [s for s in finite if s not in set(recentered)]),
                (counts, recentered),
            ]
        for pass_center, pass_stats in passes:
            outcome = _enumeration_pass(pass_center, observed, pass_stats, hyp, theta, caps)
            for s, (below_mass, below, evaluations) in outcome.items():
                p = 1.0 - below_mass
                if below or p < theta:
                    exact_p, flag = None, True
                else:
                    exact_p, flag = min(p, 1.0), False
                results[s] = TestResult(
                    statistic=s,
                    statistic_value=observed[s],
                    exact_p=exact_p,
                    below_threshold=flag,
                    asymptotic_p=asymptotic_p_lenient(s, observed[s], hyp),
                    evaluations=evaluations,
                )
    return {s: results[s] for s in stats}


def acceptance_region(hyp: Hypothesis, alpha: float, stat: StatisticKind) -> AcceptanceRegion:
    """Smallest sublevel set of ``stat`` holding at least ``1 - alpha`` null mass.

    Grows a ball around the lattice point nearest to the expectation; at each
    radius the minimal attained threshold whose sublevel set reaches the mass
    target is identified, and the loop stops once that sublevel set lies
    strictly inside the previous ball, which certifies it is the global
    acceptance region.  Membership matches ``p_value >= alpha`` pointwise.
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    if any(p == 0.0 for p in hyp.pi):
        raise ValueError("acceptance regions require all category probabilities > 0")
    target = 1.0 - alpha
    center = nearest_lattice_point(hyp)

    all_points: list[np.ndarray] = []
    all_t: list[np.ndarray] = []
    all_f: list[np.ndarray] = []
    all_r: list[np.ndarray] = []

    def candidate() -> Optional[tuple[np.ndarray, np.ndarray, np.ndarray, float]]:
        t = np.concatenate(all_t)
        f = np.concatenate(all_f)
        rad = np.concatenate(all_r)
        order = np.argsort(t, kind="stable")
        t, f, rad = t[order], f[order], rad[order]
        # Group ties (exact equality of canonical values).
        boundaries = np.flatnonzero(np.diff(t)) + 1
        starts = np.concatenate(([0], boundaries))
        ends = np.concatenate((boundaries, [t.shape[0]]))
        cumulative = np.cumsum(f)
        group_mass = cumulative[ends - 1]
        idx = int(np.searchsorted(group_mass, target))
        if idx >= starts.shape[0]:
            return None
        # Refine the boundary decision with exact summation.
        while idx < starts.shape[0] and math.fsum(f[: ends[idx]]) < target:
            idx += 1
        if idx >= starts.shape[0]:
            return None
        # When the mass hits the target exactly, the next tie group still has
        # p-value exactly alpha and belongs to the region.
        if math.fsum(f[: ends[idx]]) == target and idx + 1 < starts.shape[0]:
            idx += 1
        cut = ends[idx]
        points = np.concatenate(all_points)[order]
        return points[:cut], f[:cut], rad[:cut], float(t[cut - 1])

    chosen = None
    evaluations = 0
    for r in range(hyp.n + 1):
        shell = shell_points(center, r)
        if shell.shape[0] == 0:
            chosen = candidate()
            break
        evaluations += shell.shape[0]
        logf = log_pmf_rows(shell, hyp)
        all_points.append(shell)
        all_t.append(statistic_rows(stat, shell, hyp, logf))
        all_f.append(np.exp(logf))
        all_r.append(np.full(shell.shape[0], r, dtype=np.int64))
        found = candidate()
        if found is not None and int(found[2].max()) <= r - 1:
            chosen = found
            break
    else:
        chosen = candidate()
    if chosen is None:
        raise RuntimeError("acceptance region search failed to reach the mass target")

    points, masses, _, threshold = chosen
    order = np.lexsort(points.T[::-1])
    mass = math.fsum(masses.tolist())
    return AcceptanceRegion(
        alpha=alpha,
        statistic=stat,
        points=tuple(tuple(int(v) for v in row) for row in points[order]),
        threshold=threshold,
        mass=mass,
        test_size=1.0 - mass,
        evaluations=evaluations,
    )
