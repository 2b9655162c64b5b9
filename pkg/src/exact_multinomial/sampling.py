"""Seeded random sampling and Monte Carlo p-value estimation.

All randomness flows through numpy's PCG64 generator seeded from a
``SeedSequence``; child generators derive from ``(seed, index)`` via the
spawn-key mechanism, so parallel or out-of-order simulation cannot change
any stream.  Identical seeds give identical outputs, always.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .core import (
    CountVector,
    Hypothesis,
    ProbabilityVector,
    StatisticKind,
    validate_counts,
    validate_hypothesis,
)
from .stats import statistic_rows

#: Default number of Monte Carlo samples for p-value estimation.
DEFAULT_MC_SAMPLES = 10_000


def make_rng(seed: int) -> np.random.Generator:
    """Root generator for ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def child_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for task ``index`` under ``seed``, independent of sibling order."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def sample_uniform_simplex(rng: np.random.Generator, m: int) -> ProbabilityVector:
    """One draw from the uniform (flat Dirichlet) distribution on the simplex."""
    if m < 2:
        raise ValueError(f"need at least 2 categories, got {m}")
    e = rng.standard_exponential(m)
    return tuple(e / e.sum())


def _multinomial_batch(rng: np.random.Generator, hyp: Hypothesis, size: int) -> np.ndarray:
    # Conditional method: category j gets a binomial draw from what remains.
    counts = np.zeros((size, hyp.m), dtype=np.int64)
    remaining = np.full(size, hyp.n, dtype=np.int64)
    rest_prob = 1.0
    for j in range(hyp.m - 1):
        p = hyp.pi[j]
        if rest_prob <= 0.0:
            break
        ratio = min(max(p / rest_prob, 0.0), 1.0)
        draw = rng.binomial(remaining, ratio)
        counts[:, j] = draw
        remaining -= draw
        rest_prob -= p
    counts[:, hyp.m - 1] = remaining
    return counts


def sample_multinomial(rng: np.random.Generator, hyp: Hypothesis) -> CountVector:
    """One multinomial draw via sequential conditional binomials."""
    return tuple(int(v) for v in _multinomial_batch(rng, hyp, 1)[0])


def mc_p_values(
    x: Iterable[int],
    hyp: Hypothesis,
    stats: Sequence[StatisticKind],
    samples: int = DEFAULT_MC_SAMPLES,
    rng: np.random.Generator | None = None,
) -> dict[StatisticKind, tuple[float, float]]:
    """Monte Carlo p-value estimates for several statistics from shared draws.

    Uses the add-one estimator ``(1 + #{T(X_b) >= T(x)}) / (B + 1)``, which is
    a valid p-value and never returns zero; the standard error is the plug-in
    binomial value ``sqrt(est (1 - est) / B)``.
    """
    if samples < 1:
        raise ValueError(f"need at least one sample, got {samples}")
    counts = validate_counts(x, hyp)
    if rng is None:
        rng = make_rng(0)
    stats = tuple(dict.fromkeys(stats))
    draws = _multinomial_batch(rng, hyp, samples)
    out: dict[StatisticKind, tuple[float, float]] = {}
    observed_row = np.array([counts], dtype=np.int64)
    for s in stats:
        t_obs = float(statistic_rows(s, observed_row, hyp)[0])
        t_draws = statistic_rows(s, draws, hyp)
        hits = int(np.count_nonzero(t_draws >= t_obs))
        estimate = (1 + hits) / (samples + 1)
        stderr = math.sqrt(estimate * (1.0 - estimate) / samples)
        out[s] = (estimate, stderr)
    return out


def mc_p_value(
    x: Iterable[int],
    hyp: Hypothesis,
    stat: StatisticKind,
    samples: int = DEFAULT_MC_SAMPLES,
    rng: np.random.Generator | None = None,
) -> tuple[float, float]:
    """Monte Carlo estimate (value, standard error) of one exact p-value."""
    return mc_p_values(x, hyp, (stat,), samples, rng)[stat]


def _forecast_matrix(forecasts: Sequence[Iterable[float]]) -> np.ndarray:
    rows = [tuple(f) for f in forecasts]
    if not rows:
        raise ValueError("forecast list must not be empty")
    m = len(rows[0])
    if any(len(r) != m for r in rows):
        raise ValueError("forecasts must all have the same length")
    return np.asarray(rows, dtype=np.float64)


def _generalized_batch(rng: np.random.Generator, matrix: np.ndarray, size: int) -> np.ndarray:
    # One categorical draw per forecast row, summed into counts, `size` times.
    n, m = matrix.shape
    cum = np.cumsum(matrix, axis=1)
    out = np.empty((size, m), dtype=np.int64)
    chunk = max(1, min(size, 4_000_000 // max(n, 1)))
    done = 0
    while done < size:
        b = min(chunk, size - done)
        u = rng.random((b, n))
        cats = (u[:, :, None] > cum[None, :, :-1]).sum(axis=2)
        flat = cats + np.arange(b)[:, None] * m
        out[done : done + b] = np.bincount(flat.ravel(), minlength=b * m).reshape(b, m)
        done += b
    return out


def sample_generalized_multinomial(
    rng: np.random.Generator, forecasts: Sequence[Iterable[float]]
) -> CountVector:
    """One draw from the convolution of single-trial multinomials.

    Each forecast contributes one categorical outcome; the result is the
    vector of outcome counts (total equals the number of forecasts).
    """
    matrix = _forecast_matrix(forecasts)
    return tuple(int(v) for v in _generalized_batch(rng, matrix, 1)[0])


def mc_p_value_generalized(
    xbar: Iterable[int],
    forecasts: Sequence[Iterable[float]],
    stat: StatisticKind,
    samples: int = DEFAULT_MC_SAMPLES,
    rng: np.random.Generator | None = None,
) -> tuple[float, float]:
    """Monte Carlo p-value under the generalized multinomial null.

    Draws come from the convolution of the individual forecasts while the
    statistic is evaluated against the mean forecast, mirroring how grouped
    forecast cells are tested.
    """
    if samples < 1:
        raise ValueError(f"need at least one sample, got {samples}")
    matrix = _forecast_matrix(forecasts)
    mean_forecast = matrix.mean(axis=0)
    hyp = validate_hypothesis(mean_forecast, matrix.shape[0])
    counts = validate_counts(xbar, hyp)
    if rng is None:
        rng = make_rng(0)
    t_obs = float(statistic_rows(stat, np.array([counts], dtype=np.int64), hyp)[0])
    draws = _generalized_batch(rng, matrix, samples)
    t_draws = statistic_rows(stat, draws, hyp)
    hits = int(np.count_nonzero(t_draws >= t_obs))
    estimate = (1 + hits) / (samples + 1)
    stderr = math.sqrt(estimate * (1.0 - estimate) / samples)
    return estimate, stderr
