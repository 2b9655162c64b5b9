"""Shared helpers for the test suite."""

from __future__ import annotations

import numpy as np

from exact_multinomial import Hypothesis, simplex_size, validate_hypothesis


def unrank_lattice_point(index: int, n: int, m: int) -> tuple[int, ...]:
    """The ``index``-th point of the discrete simplex in lexicographic order."""
    point = []
    remaining = n
    for depth in range(m - 1):
        tail = m - depth - 1  # coordinates still to fill after this one
        v = 0
        while True:
            block = simplex_size(remaining - v, tail) if tail >= 2 else 1
            if index < block:
                break
            index -= block
            v += 1
        point.append(v)
        remaining -= v
    point.append(remaining)
    return tuple(point)


def random_lattice_point(rng: np.random.Generator, n: int, m: int) -> tuple[int, ...]:
    """Uniform draw over all lattice points of the discrete simplex."""
    return unrank_lattice_point(int(rng.integers(simplex_size(n, m))), n, m)


def random_positive_hypothesis(
    rng: np.random.Generator, n: int, m: int, floor: float = 1e-3
) -> Hypothesis:
    """Hypothesis with a uniform-simplex parameter bounded away from zero."""
    e = rng.standard_exponential(m) + floor
    return validate_hypothesis(tuple(e / e.sum()), n)
