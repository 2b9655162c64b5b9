"""Calibration simplex: hexagonally binned diagnostic for ternary forecasts.

Forecast/outcome pairs are grouped by the nearest center of a triangular
lattice over the probability simplex (whose cells are hexagons), each cell
compares mean forecast against outcome frequencies, and an exact multinomial
p-value quantifies how surprising the discrepancy is.  A p-value can be
exactly zero only when an outcome that was forecast probability zero
occurred anyway; such cells are drawn black.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import IO, Iterable, Optional, Sequence

import numpy as np

from .core import LLR, ProbabilityVector, StatisticKind, validate_hypothesis
from .exact import DEFAULT_THETA, p_value_exact

_COLORS = {"blue": "#1f77b4", "orange": "#ff7f0e", "red": "#d62728", "black": "#000000"}

#: Plot-plane corners of the simplex for outcomes 1, 2, 3.
_CORNERS = ((0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3.0) / 2.0))


class ForecastParseError(ValueError):
    """Malformed forecast input; carries the 1-based source line number."""

    def __init__(self, line_number: int, message: str) -> None:
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


@dataclass(frozen=True)
class ForecastRecord:
    """A ternary probability forecast and its realized outcome (1, 2 or 3)."""

    f: ProbabilityVector
    outcome: int


@dataclass(frozen=True)
class HexGrid:
    """Triangular lattice of cell centers at resolution ``h``.

    Centers are all (i/h, j/h, k/h) with i + j + k = h, listed in
    lexicographic (i, j, k) order; there are (h+1)(h+2)/2 of them.
    """

    resolution: int
    centers: tuple[ProbabilityVector, ...]

    @classmethod
    def with_resolution(cls, h: int) -> "HexGrid":
        if h < 1:
            raise ValueError(f"resolution must be >= 1, got {h}")
        centers = []
        for i in range(h + 1):
            for j in range(h - i + 1):
                k = h - i - j
                centers.append((i / h, j / h, k / h))
        return cls(resolution=h, centers=tuple(centers))


@dataclass(frozen=True)
class HexCellSummary:
    """Per-cell aggregate: counts, mean forecast, displacement and p-value."""

    center: ProbabilityVector
    count: int
    mean_forecast: ProbabilityVector
    outcome_counts: tuple[int, int, int]
    displacement: tuple[float, float, float]
    p_value: Optional[float]
    below_threshold: bool
    color_class: str


def classify_p(p: Optional[float]) -> str:
    """Color class of a p-value: blue > 0.1 >= orange >= 0.01 > red > 0 = black.

    ``None`` marks a below-threshold result, which with the default threshold
    means p < 0.01 and is shown red.
    """
    if p is None:
        return "red"
    if p == 0.0:
        return "black"
    if p > 0.1:
        return "blue"
    if p >= 0.01:
        return "orange"
    return "red"


def parse_forecasts(source: Iterable[str]) -> list[ForecastRecord]:
    """Parse delimited text with header ``p1,p2,p3,outcome`` into records.

    Raises :class:`ForecastParseError` with the offending line number on
    malformed rows, probability vectors off the simplex, or outcomes outside
    {1, 2, 3}.  Blank lines are ignored.
    """
    records: list[ForecastRecord] = []
    header_seen = False
    for line_number, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line:
            continue
        if not header_seen:
            fields = [f.strip().lower() for f in line.split(",")]
            if fields != ["p1", "p2", "p3", "outcome"]:
                raise ForecastParseError(line_number, f"expected header 'p1,p2,p3,outcome', got {line!r}")
            header_seen = True
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != 4:
            raise ForecastParseError(line_number, f"expected 4 fields, got {len(fields)}")
        try:
            probs = [float(fields[0]), float(fields[1]), float(fields[2])]
            outcome = int(fields[3])
        except ValueError:
            raise ForecastParseError(line_number, f"could not parse {line!r}") from None
        for v in probs:
            if not (0.0 <= v <= 1.0):
                raise ForecastParseError(line_number, f"probability outside [0, 1]: {v!r}")
        total = math.fsum(probs)
        if abs(total - 1.0) > 1e-12:
            raise ForecastParseError(line_number, f"probabilities sum to {total!r}, not 1")
        if outcome not in (1, 2, 3):
            raise ForecastParseError(line_number, f"outcome must be 1, 2 or 3, got {outcome}")
        records.append(ForecastRecord(f=tuple(v / total for v in probs), outcome=outcome))
    if not header_seen:
        raise ForecastParseError(1, "empty input, expected header 'p1,p2,p3,outcome'")
    return records


def assign(record: ForecastRecord, grid: HexGrid) -> int:
    """Index of the grid center nearest to the forecast (Euclidean, barycentric).

    Exact distance ties go to the lexicographically smallest (i, j, k) center,
    which is the first one in grid order.
    """
    centers = np.asarray(grid.centers)
    f = np.asarray(record.f)
    d2 = ((centers - f) ** 2).sum(axis=1)
    return int(np.argmin(d2))


def summarize(
    records: Sequence[ForecastRecord],
    grid: HexGrid,
    min_count: int = 10,
    theta: float = DEFAULT_THETA,
    scale: float = 1.0,
    stat: StatisticKind = LLR,
) -> list[HexCellSummary]:
    """Summaries for every cell holding at least ``min_count`` records.

    The cell's outcome counts are tested against a multinomial with the mean
    forecast as parameter.  If an outcome with mean forecast probability zero
    occurred, the p-value is exactly zero (black cell) without running the
    test.  ``displacement = scale * (outcome_freq - mean_forecast)``.
    """
    if min_count < 1:
        raise ValueError(f"min_count must be >= 1, got {min_count}")
    cells: dict[int, list[ForecastRecord]] = {}
    for record in records:
        cells.setdefault(assign(record, grid), []).append(record)

    summaries = []
    for cell_index in sorted(cells):
        members = cells[cell_index]
        n_g = len(members)
        if n_g < min_count:
            continue
        mean_forecast = tuple(
            math.fsum(r.f[j] for r in members) / n_g for j in range(3)
        )
        outcome_counts = [0, 0, 0]
        for r in members:
            outcome_counts[r.outcome - 1] += 1
        hyp = validate_hypothesis(mean_forecast, n_g)
        impossible = any(
            hyp.pi[j] == 0.0 and outcome_counts[j] > 0 for j in range(3)
        )
        if impossible:
            p_value: Optional[float] = 0.0
            below = False
        else:
            result = p_value_exact(tuple(outcome_counts), hyp, theta, (stat,))[stat]
            p_value = result.exact_p
            below = result.below_threshold
        displacement = tuple(
            scale * (outcome_counts[j] / n_g - hyp.pi[j]) for j in range(3)
        )
        summaries.append(
            HexCellSummary(
                center=grid.centers[cell_index],
                count=n_g,
                mean_forecast=hyp.pi,
                outcome_counts=tuple(outcome_counts),
                displacement=displacement,
                p_value=p_value,
                below_threshold=below,
                color_class=classify_p(None if below else p_value),
            )
        )
    return summaries


def project(point: Sequence[float]) -> tuple[float, float]:
    """Barycentric coordinates to plot plane; corner j maps to vertex j exactly."""
    x = sum(point[j] * _CORNERS[j][0] for j in range(3))
    y = sum(point[j] * _CORNERS[j][1] for j in range(3))
    return (x, y)


def _hexagon_path(cx: float, cy: float, radius: float) -> str:
    pts = []
    for k in range(6):
        angle = math.pi / 6.0 + k * math.pi / 3.0
        pts.append(f"{cx + radius * math.cos(angle):.4f},{cy + radius * math.sin(angle):.4f}")
    return "M" + " L".join(pts) + " Z"


def render_svg(
    summaries: Sequence[HexCellSummary],
    grid: HexGrid,
    width: int = 640,
    max_circle_fraction: float = 0.95,
) -> str:
    """SVG document: hexagon outlines for all centers, one displaced circle per cell.

    Circle areas are proportional to cell counts, normalized so the fullest
    cell fills ``max_circle_fraction`` of a hexagon's inradius.
    """
    margin = 0.08
    span = 1.0 + 2.0 * margin
    scale = width / span
    height = int(round((_CORNERS[2][1] + 2.0 * margin) * scale))

    def to_px(p: tuple[float, float]) -> tuple[float, float]:
        return ((p[0] + margin) * scale, height - (p[1] + margin) * scale)

    hex_circumradius = scale / (grid.resolution * math.sqrt(3.0))
    hex_inradius = hex_circumradius * math.sqrt(3.0) / 2.0

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    tri = [to_px(c) for c in _CORNERS]
    tri_path = " L".join(f"{x:.4f},{y:.4f}" for x, y in tri)
    parts.append(f'<path d="M{tri_path} Z" fill="none" stroke="#555555" stroke-width="1.2"/>')
    for center in grid.centers:
        cx, cy = to_px(project(center))
        parts.append(
            f'<path d="{_hexagon_path(cx, cy, hex_circumradius)}" fill="none" '
            f'stroke="#bbbbbb" stroke-width="0.6"/>'
        )
    if summaries:
        max_count = max(s.count for s in summaries)
        for s in summaries:
            shifted = tuple(s.center[j] + s.displacement[j] for j in range(3))
            cx, cy = to_px(project(shifted))
            radius = max_circle_fraction * hex_inradius * math.sqrt(s.count / max_count)
            fill = _COLORS[s.color_class]
            parts.append(f'<circle cx="{cx:.4f}" cy="{cy:.4f}" r="{radius:.4f}" fill="{fill}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def summaries_to_json(summaries: Sequence[HexCellSummary], grid: HexGrid) -> str:
    """JSON document with grid metadata and one object per qualifying cell."""
    doc = {
        "resolution": grid.resolution,
        "cells": [
            {
                "center": list(s.center),
                "count": s.count,
                "mean_forecast": list(s.mean_forecast),
                "outcome_counts": list(s.outcome_counts),
                "displacement": list(s.displacement),
                "p_value": 0.0 if s.below_threshold else s.p_value,
                "below_threshold": s.below_threshold,
                "color_class": s.color_class,
            }
            for s in summaries
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def render(
    summaries: Sequence[HexCellSummary],
    grid: HexGrid,
    svg_out: IO[str],
    json_out: IO[str],
) -> None:
    """Write the SVG and JSON documents for a set of cell summaries."""
    svg_out.write(render_svg(summaries, grid))
    json_out.write(summaries_to_json(summaries, grid))
