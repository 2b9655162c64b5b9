"""Test statistics and log probability mass evaluation.

All probability work happens in natural-log space through the log-gamma
function so trial counts in the thousands neither overflow nor underflow.

Every statistic value is produced by one canonical row-vectorized kernel
(scalar calls delegate to it), so equal inputs give bitwise-equal outputs.
Downstream tie detection compares computed values for exact equality and
relies on this.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional

import numpy as np
from scipy.special import gammaln

from .core import (
    CountVector,
    Hypothesis,
    StatisticKind,
    validate_counts,
)


@dataclass(frozen=True)
class GapBound:
    """Open interval bounding the probability-mass / log-likelihood-ratio gap."""

    lower: float
    upper: float


@lru_cache(maxsize=4096)
def _log_pmf_at_mean(hyp: Hypothesis) -> float:
    # log of the continuous pmf extension at the expectation n*pi, with
    # zero-probability categories contributing 0 (their limit value).
    n = hyp.n
    total = math.lgamma(n + 1)
    for p in hyp.pi:
        if p > 0.0:
            total += n * p * math.log(p) - math.lgamma(n * p + 1)
    return total


def continuous_log_pmf_at_expectation(hyp: Hypothesis) -> float:
    """Log of the continuous pmf extension evaluated at the expected counts.

    Requires strictly positive category probabilities.
    """
    if any(p == 0.0 for p in hyp.pi):
        raise ValueError("continuous pmf at expectation requires all category probabilities > 0")
    return _log_pmf_at_mean(hyp)


def log_pmf_rows(z: np.ndarray, hyp: Hypothesis) -> np.ndarray:
    """Natural-log multinomial pmf for each row of ``z`` under ``hyp``.

    Rows may be integer counts or nonnegative reals (the continuous
    extension).  Entries ``z_j = 0`` contribute 0 regardless of ``pi_j``;
    rows with ``z_j > 0`` where ``pi_j = 0`` come out as ``-inf``.
    """
    pi = np.asarray(hyp.pi, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        logpi = np.log(pi)
        cross = np.where(z > 0.0, z * logpi, 0.0)
    return math.lgamma(hyp.n + 1) - gammaln(z + 1.0).sum(axis=1) + cross.sum(axis=1)


def statistic_rows(
    stat: StatisticKind,
    z: np.ndarray,
    hyp: Hypothesis,
    log_pmf_values: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Canonical statistic evaluation for each row of ``z``.

    ``log_pmf_values`` may carry precomputed :func:`log_pmf_rows` output to
    avoid recomputing it for the probability-mass statistic.
    """
    pi = np.asarray(hyp.pi, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    n = hyp.n

    if stat.family == "prob-mass":
        if log_pmf_values is None:
            log_pmf_values = log_pmf_rows(z, hyp)
        values = -2.0 * (log_pmf_values - _log_pmf_at_mean(hyp))
    elif stat.family == "power-divergence":
        lam = stat.lam
        if lam is None or not math.isfinite(lam) or lam <= -1:
            raise ValueError(f"unsupported power divergence parameter: {lam!r}")
        positive = z > 0.0
        safe_z = np.where(positive, z, 1.0)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            dlog = np.log(safe_z) - np.log(n * pi)
            if lam == 0.0:
                terms = np.where(positive, z * dlog, 0.0)
                values = 2.0 * terms.sum(axis=1)
            else:
                terms = np.where(positive, z * np.expm1(lam * dlog), 0.0)
                values = (2.0 / (lam * (lam + 1.0))) * terms.sum(axis=1)
    else:
        raise ValueError(f"unknown statistic family: {stat.family!r}")

    # An outcome with positive count in a zero-probability category is
    # impossible under the null; every statistic treats it as +inf.
    if np.any(pi == 0.0):
        impossible = ((z > 0.0) & (pi == 0.0)).any(axis=1)
        if impossible.any():
            values = np.where(impossible, np.inf, values)
    return values


def log_pmf(x: Iterable[int], hyp: Hypothesis) -> float:
    """Natural-log probability of the observed counts ``x`` under ``hyp``."""
    counts = validate_counts(x, hyp)
    return float(log_pmf_rows(np.array([counts], dtype=np.int64), hyp)[0])


def evaluate(stat: StatisticKind, x: Iterable[int], hyp: Hypothesis) -> float:
    """Value of the test statistic ``stat`` at observed counts ``x``."""
    counts = validate_counts(x, hyp)
    return float(statistic_rows(stat, np.array([counts], dtype=np.int64), hyp)[0])


def continuous_statistic(stat: StatisticKind, u: Iterable[float], hyp: Hypothesis) -> float:
    """Statistic value at a real-valued point of the rescaled simplex.

    ``u`` must be nonnegative with entries summing to ``hyp.n``; this is the
    canonical continuous extension used in the convexity analysis.
    """
    row = np.array([list(u)], dtype=np.float64)
    if row.shape[1] != hyp.m:
        raise ValueError(f"expected {hyp.m} coordinates, got {row.shape[1]}")
    if (row < 0).any():
        raise ValueError("coordinates must be nonnegative")
    if abs(float(row.sum()) - hyp.n) > 1e-9 * max(1.0, hyp.n):
        raise ValueError(f"coordinates must sum to {hyp.n}")
    return float(statistic_rows(stat, row, hyp)[0])


def gap_bound(x: Iterable[int], hyp: Hypothesis) -> GapBound:
    """Open bounds on ``T_prob_mass - T_llr - sum(log(x_j/(n pi_j)))``.

    The bound follows from the Stirling remainder ``0 < r(t) < 1/(12 t)`` of
    the log-gamma expansion; zero-count categories enter through the
    convention that their log term vanishes, which shifts both endpoints by
    ``-log(n pi_j)``.  Requires all ``pi_j > 0``.
    """
    counts = validate_counts(x, hyp)
    if any(p == 0.0 for p in hyp.pi):
        raise ValueError("gap bound requires all category probabilities > 0")
    n = hyp.n
    lower = 0.0
    upper = 0.0
    for c, p in zip(counts, hyp.pi):
        lower -= 2.0 / (12.0 * n * p)
        if c > 0:
            upper += 2.0 / (12.0 * c)
        else:
            shift = -math.log(n * p)
            lower += shift
            upper += shift
    return GapBound(lower, upper)
