"""Compensated floating-point accumulation.

Probability masses are accumulated over up to millions of lattice points;
naive ``+=`` loses roughly the last five digits in that regime.  The
accumulator below keeps a Neumaier-style running compensation so chunk sums
can be folded in without drift.
"""

from __future__ import annotations


class CompensatedSum:
    """Running sum with Kahan-Babuska (Neumaier) error compensation."""

    __slots__ = ("_sum", "_compensation")

    def __init__(self, value: float = 0.0) -> None:
        self._sum = float(value)
        self._compensation = 0.0

    def add(self, value: float) -> None:
        t = self._sum + value
        if abs(self._sum) >= abs(value):
            self._compensation += (self._sum - t) + value
        else:
            self._compensation += (value - t) + self._sum
        self._sum = t

    @property
    def value(self) -> float:
        return self._sum + self._compensation
