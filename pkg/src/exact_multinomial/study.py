"""Simulation study harness: sample (pi, x) pairs, compute p-values, summarize.

Each pair gets its own child generator derived from (seed, index), so the
records are reproducible and order-independent.  Wall-clock timings wrap the
single p-value call and nothing else; every non-timing field is bit-identical
across runs with the same seed.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from typing import IO, Iterable, Optional, Sequence

from .core import (
    CHISQ,
    CountVector,
    LLR,
    PROB_MASS,
    ProbabilityVector,
    validate_hypothesis,
)
from .exact import DEFAULT_THETA, p_value_exact, p_values_full_enum
from .sampling import DEFAULT_MC_SAMPLES, child_rng, mc_p_values, sample_multinomial, sample_uniform_simplex

#: Statistic order used in records and file columns.
STUDY_STATISTICS = (PROB_MASS, CHISQ, LLR)
_STAT_SUFFIXES = ("prob", "chisq", "llr")


@dataclass(frozen=True)
class StudyConfig:
    """Configuration of one simulation run."""

    pairs: int
    n: int
    m: int
    theta: float = DEFAULT_THETA
    seed: int = 0
    oracle_subset: int = 0
    mc_subset: int = 0
    mc_samples: int = DEFAULT_MC_SAMPLES

    def validate(self) -> None:
        if self.pairs < 1:
            raise ValueError(f"pairs must be >= 1, got {self.pairs}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.m < 2:
            raise ValueError(f"m must be >= 2, got {self.m}")
        if self.oracle_subset < 0 or self.mc_subset < 0:
            raise ValueError("subset sizes must be nonnegative")
        if self.mc_samples < 1:
            raise ValueError("mc_samples must be >= 1")


@dataclass(frozen=True)
class StudyRecord:
    """One simulated pair with its p-values and runtimes (nanoseconds)."""

    seed: int
    index: int
    pi: ProbabilityVector
    x: CountVector
    exact_p: tuple[Optional[float], Optional[float], Optional[float]]
    below: tuple[bool, bool, bool]
    asymptotic_p: tuple[float, float, float]
    rt_alg_ns: int
    rt_full_ns: Optional[int] = None
    rt_mc_ns: Optional[int] = None
    oracle_p: Optional[tuple[float, float, float]] = None
    mc_p: Optional[tuple[float, float, float]] = None

    @property
    def mean_p(self) -> Optional[float]:
        if any(v is None for v in self.exact_p):
            return None
        return math.fsum(self.exact_p) / 3.0


@dataclass(frozen=True)
class GroupSummary:
    """Aggregates over one block of records with similar mean p-value."""

    group_index: int
    size: int
    mean_p_range: tuple[float, float]
    mean_runtime_ns: float
    runtime_q05_ns: int
    runtime_q95_ns: int
    mean_relative_error: tuple[float, float, float]
    mean_relative_difference: tuple[float, float, float]


def run_study(config: StudyConfig) -> list[StudyRecord]:
    """Generate records per the configuration; see the module docstring."""
    config.validate()
    records = []
    for i in range(config.pairs):
        rng = child_rng(config.seed, i)
        pi = sample_uniform_simplex(rng, config.m)
        hyp = validate_hypothesis(pi, config.n)
        x = sample_multinomial(rng, hyp)

        t0 = time.perf_counter_ns()
        results = p_value_exact(x, hyp, config.theta, STUDY_STATISTICS)
        rt_alg = time.perf_counter_ns() - t0

        oracle = None
        rt_full = None
        if i < config.oracle_subset:
            t0 = time.perf_counter_ns()
            full = p_values_full_enum(x, hyp, STUDY_STATISTICS)
            rt_full = time.perf_counter_ns() - t0
            oracle = tuple(full[s] for s in STUDY_STATISTICS)

        mc = None
        rt_mc = None
        if i < config.mc_subset:
            t0 = time.perf_counter_ns()
            estimates = mc_p_values(x, hyp, STUDY_STATISTICS, config.mc_samples, rng)
            rt_mc = time.perf_counter_ns() - t0
            mc = tuple(estimates[s][0] for s in STUDY_STATISTICS)

        records.append(
            StudyRecord(
                seed=config.seed,
                index=i,
                pi=pi,
                x=x,
                exact_p=tuple(results[s].exact_p for s in STUDY_STATISTICS),
                below=tuple(results[s].below_threshold for s in STUDY_STATISTICS),
                asymptotic_p=tuple(results[s].asymptotic_p for s in STUDY_STATISTICS),
                rt_alg_ns=rt_alg,
                rt_full_ns=rt_full,
                rt_mc_ns=rt_mc,
                oracle_p=oracle,
                mc_p=mc,
            )
        )
    return records


def relative_error(approx: float, exact: float) -> float:
    """Deviation of an approximation in parts of the exact value."""
    if exact <= 0.0:
        raise ValueError("relative error requires a positive exact value")
    return (approx - exact) / exact


def relative_difference(p_a: float, p_b: float) -> float:
    """Difference of two p-values relative to their mean."""
    if p_a < 0.0 or p_b < 0.0:
        raise ValueError("p-values must be nonnegative")
    mean = (p_a + p_b) / 2.0
    if mean == 0.0:
        raise ValueError("relative difference is undefined when both values are 0")
    return (p_a - p_b) / mean


def _nearest_rank(sorted_values: Sequence[int], q: float) -> int:
    k = len(sorted_values)
    idx = max(math.ceil(q * k), 1) - 1
    return sorted_values[min(idx, k - 1)]


def group_summaries(records: Iterable[StudyRecord], group_size: int = 1000) -> list[GroupSummary]:
    """Block records by ascending mean p-value and aggregate each block.

    Only records whose three exact p-values are all present participate.  The
    last block may be short.  Runtime quantiles are nearest-rank.
    """
    if group_size < 1:
        raise ValueError(f"group_size must be >= 1, got {group_size}")
    usable = [r for r in records if r.mean_p is not None]
    usable.sort(key=lambda r: (r.mean_p, r.index))
    summaries = []
    for g, start in enumerate(range(0, len(usable), group_size)):
        block = usable[start : start + group_size]
        runtimes = sorted(r.rt_alg_ns for r in block)
        rel_err = []
        for k in range(3):
            rel_err.append(
                math.fsum(relative_error(r.asymptotic_p[k], r.exact_p[k]) for r in block) / len(block)
            )
        pairs = ((0, 1), (0, 2), (1, 2))
        rel_diff = []
        for a, b in pairs:
            rel_diff.append(
                math.fsum(relative_difference(r.exact_p[a], r.exact_p[b]) for r in block) / len(block)
            )
        summaries.append(
            GroupSummary(
                group_index=g,
                size=len(block),
                mean_p_range=(block[0].mean_p, block[-1].mean_p),
                mean_runtime_ns=math.fsum(runtimes) / len(runtimes),
                runtime_q05_ns=_nearest_rank(runtimes, 0.05),
                runtime_q95_ns=_nearest_rank(runtimes, 0.95),
                mean_relative_error=tuple(rel_err),
                mean_relative_difference=tuple(rel_diff),
            )
        )
    return summaries


def _format_value(v: object) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def csv_header(m: int, timings: bool = True) -> list[str]:
    cols = ["seed", "index"]
    cols += [f"pi_{j + 1}" for j in range(m)]
    cols += [f"x_{j + 1}" for j in range(m)]
    cols += [f"p_{s}" for s in _STAT_SUFFIXES]
    cols += [f"below_{s}" for s in _STAT_SUFFIXES]
    cols += [f"ap_{s}" for s in _STAT_SUFFIXES]
    if timings:
        cols += ["rt_alg_ns", "rt_full_ns", "rt_mc_ns"]
    return cols


def write_records_csv(records: Sequence[StudyRecord], out: IO[str], timings: bool = True) -> None:
    """Write records as delimited text with a header row; empty cells for absent values."""
    if not records:
        raise ValueError("no records to write")
    m = len(records[0].pi)
    out.write(",".join(csv_header(m, timings)) + "\n")
    for r in records:
        row: list[object] = [r.seed, r.index, *r.pi, *r.x]
        row += [p if p is not None else None for p in r.exact_p]
        row += list(r.below)
        row += list(r.asymptotic_p)
        if timings:
            row += [r.rt_alg_ns, r.rt_full_ns, r.rt_mc_ns]
        out.write(",".join(_format_value(v) for v in row) + "\n")


def write_summaries_json(summaries: Sequence[GroupSummary], out: IO[str]) -> None:
    """Write one JSON object per group, one per line."""
    for s in summaries:
        out.write(
            json.dumps(
                {
                    "group_index": s.group_index,
                    "size": s.size,
                    "mean_p_range": list(s.mean_p_range),
                    "mean_runtime_ns": s.mean_runtime_ns,
                    "runtime_q05_ns": s.runtime_q05_ns,
                    "runtime_q95_ns": s.runtime_q95_ns,
                    "mean_relative_error": {
                        "prob": s.mean_relative_error[0],
                        "chisq": s.mean_relative_error[1],
                        "llr": s.mean_relative_error[2],
                    },
                    "mean_relative_difference": {
                        "prob_vs_chisq": s.mean_relative_difference[0],
                        "prob_vs_llr": s.mean_relative_difference[1],
                        "chisq_vs_llr": s.mean_relative_difference[2],
                    },
                }
            )
            + "\n"
        )
