"""Lattice enumeration on the discrete simplex.

Distances are rescaled Manhattan (half the L1 norm), which is integer-valued
between points of equal total and counts minimal unit-transfer moves.

Two access styles are provided: streaming generators (``enumerate_full``,
``enumerate_shell``) that keep O(m) state, and block/array producers
(``iter_full_blocks``, ``shell_points``) used by the vectorized numeric
paths.  Both must agree point-for-point; the tests check this.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterator, Optional, Sequence

import numpy as np

from .core import CountVector, Hypothesis


def distance(x: Sequence[int], y: Sequence[int]) -> int:
    """Rescaled Manhattan distance between two equal-total count vectors."""
    if len(x) != len(y):
        raise ValueError(f"dimension mismatch: {len(x)} vs {len(y)}")
    total = sum(abs(a - b) for a, b in zip(x, y))
    return total // 2


def nearest_lattice_point(hyp: Hypothesis) -> CountVector:
    """Lattice point of the discrete simplex closest to the expectation ``n*pi``.

    Largest-remainder rounding: floor each coordinate of ``n*pi``, then hand
    the leftover units to the coordinates with the largest fractional parts,
    breaking ties toward the lowest index.  This minimizes the rescaled
    Manhattan distance to ``n*pi``.
    """
    n = hyp.n
    scaled = [n * p for p in hyp.pi]
    base = [math.floor(v) for v in scaled]
    remaining = n - sum(base)
    if remaining:
        order = sorted(range(hyp.m), key=lambda j: (-(scaled[j] - base[j]), j))
        for j in order[:remaining]:
            base[j] += 1
    return tuple(base)


def enumerate_full(n: int, m: int) -> Iterator[CountVector]:
    """Yield every point of the discrete simplex in lexicographic order."""
    if n < 0 or m < 2:
        raise ValueError("need n >= 0 and m >= 2")

    def rec(prefix: tuple[int, ...], remaining: int, depth: int) -> Iterator[CountVector]:
        if depth == m - 1:
            yield prefix + (remaining,)
            return
        for v in range(remaining + 1):
            yield from rec(prefix + (v,), remaining - v, depth + 1)

    yield from rec((), n, 0)


def simplex_size(n: int, m: int) -> int:
    """Number of lattice points: C(n + m - 1, m - 1)."""
    return math.comb(n + m - 1, m - 1)


def _fill_lex(buf: np.ndarray, n: int) -> None:
    # Fill buf (rows = simplex_size(n, m)) with the lattice in lex order.
    m = buf.shape[1]
    if m == 1:
        buf[:, 0] = n
        return
    if m == 2:
        v = np.arange(n + 1, dtype=np.int64)
        buf[:, 0] = v
        buf[:, 1] = n - v
        return
    row = 0
    for v in range(n + 1):
        k = simplex_size(n - v, m - 1)
        buf[row : row + k, 0] = v
        _fill_lex(buf[row : row + k, 1:], n - v)
        row += k


def iter_full_blocks(n: int, m: int, max_rows: int = 200_000) -> Iterator[np.ndarray]:
    """Yield the full lattice as int64 arrays of at most ``max_rows`` rows.

    Concatenating the blocks reproduces ``enumerate_full`` order exactly.
    """
    count = simplex_size(n, m)
    if count <= max_rows or m == 2:
        buf = np.empty((count, m), dtype=np.int64)
        _fill_lex(buf, n)
        yield buf
        return
    for v in range(n + 1):
        for block in iter_full_blocks(n - v, m - 1, max_rows):
            out = np.empty((block.shape[0], m), dtype=np.int64)
            out[:, 0] = v
            out[:, 1:] = block
            yield out


@lru_cache(maxsize=None)
def _deviation_array(m: int, r: int) -> np.ndarray:
    # All integer vectors d with sum(d) = 0 and sum(|d|)/2 = r, i.e. the
    # surplus/deficit patterns realizing a shell of radius r.  Centered at a
    # point y, the shell is {y + d} clipped to the simplex.
    if r == 0:
        return np.zeros((1, m), dtype=np.int64)
    rows: list[tuple[int, ...]] = []
    d = [0] * m

    def rec(j: int, surplus: int, deficit: int) -> None:
        if j == m - 1:
            if surplus == 0 or deficit == 0:
                d[j] = surplus - deficit
                rows.append(tuple(d))
            return
        for v in range(-deficit, surplus + 1):
            d[j] = v
            if v > 0:
                rec(j + 1, surplus - v, deficit)
            elif v < 0:
                rec(j + 1, surplus, deficit + v)
            else:
                rec(j + 1, surplus, deficit)

    rec(0, r, r)
    return np.array(rows, dtype=np.int64)


def shell_points(
    center: Sequence[int],
    r: int,
    upper: Optional[Sequence[Optional[int]]] = None,
) -> np.ndarray:
    """Lattice points at rescaled Manhattan distance exactly ``r`` from ``center``.

    ``upper`` optionally caps individual coordinates (``None`` entries mean
    uncapped); capped-out points are dropped entirely.  Returns an int64
    array of shape (k, m), possibly empty.
    """
    if r < 0:
        raise ValueError("radius must be nonnegative")
    m = len(center)
    dev = _deviation_array(m, r)
    pts = np.asarray(center, dtype=np.int64) + dev
    keep = (pts >= 0).all(axis=1)
    if upper is not None:
        for j, cap in enumerate(upper):
            if cap is not None:
                keep &= pts[:, j] <= max(cap, center[j])
    return pts[keep]


def enumerate_shell(center: Sequence[int], r: int) -> Iterator[CountVector]:
    """Stream the shell of radius ``r`` around ``center``, one point at a time."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    center = tuple(int(c) for c in center)
    m = len(center)
    if r == 0:
        yield center
        return
    point = [0] * m

    def rec(j: int, surplus: int, deficit: int) -> Iterator[CountVector]:
        if j == m - 1:
            if surplus == 0 or deficit == 0:
                v = center[j] + surplus - deficit
                if v >= 0:
                    point[j] = v
                    yield tuple(point)
            return
        low = -min(center[j], deficit)
        for v in range(low, surplus + 1):
            point[j] = center[j] + v
            if v > 0:
                yield from rec(j + 1, surplus - v, deficit)
            elif v < 0:
                yield from rec(j + 1, surplus, deficit + v)
            else:
                yield from rec(j + 1, surplus, deficit)

    yield from rec(0, r, r)


def binomial_tail(k: int, n: int, p: float) -> float:
    """Upper tail P(Bin(n, p) >= k), computed stably in log space."""
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"probability out of [0, 1]: {p!r}")
    if k <= 0:
        return 1.0
    if k > n:
        return 0.0
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0
    log_p = math.log(p)
    log_q = math.log1p(-p)
    terms = [
        math.lgamma(n + 1) - math.lgamma(i + 1) - math.lgamma(n - i + 1) + i * log_p + (n - i) * log_q
        for i in range(k, n + 1)
    ]
    peak = max(terms)
    if peak == -math.inf:
        return 0.0
    total = peak + math.log(math.fsum(math.exp(t - peak) for t in terms))
    return min(math.exp(total), 1.0)


def sparse_upper_bounds(hyp: Hypothesis, theta: float) -> Optional[list[Optional[int]]]:
    """Per-coordinate caps implementing the sparse-category skip.

    For categories with expectation ``n * pi_i < 1/2`` the enumeration only
    keeps points ``z`` with ``P(X_i >= z_i) >= theta * 1e-8``; this returns
    the largest admissible ``z_i`` per such category, or ``None`` when no
    category is sparse.
    """
    cutoff = theta * 1e-8
    caps: list[Optional[int]] = [None] * hyp.m
    any_sparse = False
    for i, p in enumerate(hyp.pi):
        if hyp.n * p < 0.5:
            any_sparse = True
            k = 0
            while k + 1 <= hyp.n and binomial_tail(k + 1, hyp.n, p) >= cutoff:
                k += 1
            caps[i] = k
    return caps if any_sparse else None
