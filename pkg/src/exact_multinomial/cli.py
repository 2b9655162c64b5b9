"""Command-line interface.

Subcommands expose exact tests, acceptance regions, power curves, the
simulation study and the calibration simplex.  Exit codes: 0 success,
2 argument/validation problems, 3 I/O failures, 4 malformed data content.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__
from .calsim import HexGrid, ForecastParseError, parse_forecasts, render_svg, summaries_to_json, summarize
from .core import (
    CHISQ,
    DEFAULT_STATISTICS,
    LLR,
    PROB_MASS,
    StatisticKind,
    power_divergence,
    validate_counts,
    validate_hypothesis,
)
from .exact import DEFAULT_THETA, acceptance_region, p_value_exact
from .randomized import power_curve
from .study import (
    StudyConfig,
    group_summaries,
    run_study,
    write_records_csv,
    write_summaries_json,
)


def _parse_number_list(text: str) -> list[float]:
    values = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            raise ValueError(f"empty entry in list {text!r}")
        try:
            values.append(float(Fraction(token)))
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"could not parse number {token!r}") from None
    return values


def _parse_int_list(text: str) -> list[int]:
    values = []
    for token in text.split(","):
        token = token.strip()
        try:
            values.append(int(token))
        except ValueError:
            raise ValueError(f"could not parse integer {token!r}") from None
    return values


def _parse_stats(text: str) -> list[StatisticKind]:
    out: list[StatisticKind] = []
    for token in text.split(","):
        token = token.strip().lower()
        if token == "all":
            out.extend(DEFAULT_STATISTICS)
        elif token == "prob-mass":
            out.append(PROB_MASS)
        elif token == "chisq":
            out.append(CHISQ)
        elif token == "llr":
            out.append(LLR)
        elif token.startswith("pd:"):
            out.append(power_divergence(float(Fraction(token[3:]))))
        else:
            raise ValueError(
                f"unknown statistic {token!r}; expected prob-mass, chisq, llr, all or pd:LAMBDA"
            )
    if not out:
        raise ValueError("no statistic selected")
    return list(dict.fromkeys(out))


def _emit(rows: list[dict], args: argparse.Namespace, json_doc: Optional[dict] = None) -> None:
    fmt = getattr(args, "format", "text")
    if fmt == "json":
        print(json.dumps(json_doc if json_doc is not None else rows, indent=2))
    elif fmt == "csv":
        if rows:
            header = list(rows[0].keys())
            print(",".join(header))
            for row in rows:
                print(",".join("" if row[k] is None else str(row[k]) for k in header))
    else:
        for row in rows:
            print("  ".join(f"{k}={'' if v is None else v}" for k, v in row.items()))


def _cmd_test(args: argparse.Namespace) -> int:
    hyp = validate_hypothesis(_parse_number_list(args.pi), sum(_parse_int_list(args.x)))
    x = validate_counts(_parse_int_list(args.x), hyp)
    stats = _parse_stats(args.stat)
    results = p_value_exact(x, hyp, args.theta, stats)
    rows = []
    for s in stats:
        r = results[s]
        rows.append(
            {
                "statistic": s.label,
                "statistic_value": r.statistic_value,
                "exact_p": 0.0 if r.below_threshold else r.exact_p,
                "below_threshold": r.below_threshold,
                "asymptotic_p": r.asymptotic_p,
                "evaluations": r.evaluations,
            }
        )
    doc = {
        "n": hyp.n,
        "pi": list(hyp.pi),
        "x": list(x),
        "theta": args.theta,
        "results": rows,
    }
    _emit(rows, args, doc)
    return 0


def _cmd_region(args: argparse.Namespace) -> int:
    hyp = validate_hypothesis(_parse_number_list(args.pi), args.n)
    (stat,) = _parse_stats(args.stat)
    region = acceptance_region(hyp, args.alpha, stat)
    summary = {
        "statistic": stat.label,
        "alpha": args.alpha,
        "count": len(region.points),
        "threshold": region.threshold,
        "mass": region.mass,
        "test_size": region.test_size,
    }
    doc = dict(summary)
    if args.points:
        doc["points"] = [list(p) for p in region.points]
    if args.format == "json":
        print(json.dumps(doc, indent=2))
    else:
        _emit([summary], args)
        if args.points:
            for p in region.points:
                print(",".join(str(v) for v in p))
    return 0


def _cmd_power(args: argparse.Namespace) -> int:
    hyp = validate_hypothesis(_parse_number_list(args.pi), args.n)
    (stat,) = _parse_stats(args.stat)
    if args.grid < 2:
        raise ValueError(f"grid must have at least 2 points, got {args.grid}")
    q_grid = [k / (args.grid - 1) for k in range(args.grid)]
    curve = power_curve(hyp, args.alpha, stat, args.axis, q_grid)
    rows = [{"q": q, "power": p} for q, p in curve]
    doc = {
        "statistic": stat.label,
        "alpha": args.alpha,
        "axis": args.axis,
        "curve": [[q, p] for q, p in curve],
    }
    _emit(rows, args, doc)
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    config = StudyConfig(
        pairs=args.pairs,
        n=args.n,
        m=args.m,
        theta=args.theta,
        seed=args.seed,
        oracle_subset=args.oracle_subset,
        mc_subset=args.mc_subset,
    )
    config.validate()
    records = run_study(config)
    with open(args.out, "w", encoding="utf-8") as fh:
        write_records_csv(records, fh, timings=not args.no_timings)
    summaries = group_summaries(records, args.group_size)
    summary_path = args.summary_out or args.out + ".groups.jsonl"
    with open(summary_path, "w", encoding="utf-8") as fh:
        write_summaries_json(summaries, fh)
    mean_alg = math.fsum(r.rt_alg_ns for r in records) / len(records)
    print(f"records: {len(records)} -> {args.out}")
    print(f"groups: {len(summaries)} -> {summary_path}")
    print(f"mean exact-test runtime: {mean_alg / 1e6:.3f} ms")
    oracle = [r for r in records if r.rt_full_ns is not None]
    if oracle:
        mean_full = math.fsum(r.rt_full_ns for r in oracle) / len(oracle)
        mean_alg_subset = math.fsum(r.rt_alg_ns for r in oracle) / len(oracle)
        print(f"mean full-enumeration runtime: {mean_full / 1e6:.3f} ms")
        print(f"speedup factor: {mean_full / mean_alg_subset:.1f}x")
    return 0


def _cmd_calsim(args: argparse.Namespace) -> int:
    with open(args.input, "r", encoding="utf-8") as fh:
        records = parse_forecasts(fh)
    grid = HexGrid.with_resolution(args.resolution)
    (stat,) = _parse_stats(args.stat)
    summaries = summarize(records, grid, args.min_count, args.theta, args.scale, stat)
    with open(args.svg, "w", encoding="utf-8") as fh:
        fh.write(render_svg(summaries, grid))
    with open(args.json, "w", encoding="utf-8") as fh:
        fh.write(summaries_to_json(summaries, grid))
    print(f"cells: {len(summaries)} -> {args.svg}, {args.json}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exact-multinomial",
        description="Exact multinomial goodness-of-fit tests and diagnostics.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_test = sub.add_parser("test", help="exact p-values for an observation")
    p_test.add_argument("--pi", required=True, help="null probabilities, comma-separated (fractions ok)")
    p_test.add_argument("--x", required=True, help="observed counts, comma-separated")
    p_test.add_argument("--theta", type=float, default=DEFAULT_THETA, help="p-value threshold")
    p_test.add_argument("--stat", default="all", help="prob-mass|chisq|llr|all|pd:LAMBDA (comma-separated)")
    p_test.add_argument("--format", choices=("json", "csv", "text"), default="text")
    p_test.set_defaults(func=_cmd_test)

    p_region = sub.add_parser("region", help="acceptance region of a statistic")
    p_region.add_argument("--pi", required=True)
    p_region.add_argument("--n", type=int, required=True)
    p_region.add_argument("--alpha", type=float, required=True)
    p_region.add_argument("--stat", default="prob-mass")
    p_region.add_argument("--points", action="store_true", help="also list the region's points")
    p_region.add_argument("--format", choices=("json", "csv", "text"), default="text")
    p_region.set_defaults(func=_cmd_region)

    p_power = sub.add_parser("power", help="power curve along a simplex line")
    p_power.add_argument("--pi", required=True)
    p_power.add_argument("--n", type=int, required=True)
    p_power.add_argument("--alpha", type=float, required=True)
    p_power.add_argument("--stat", default="prob-mass")
    p_power.add_argument("--axis", type=int, required=True, help="1-based corner index")
    p_power.add_argument("--grid", type=int, default=101, help="number of grid points on [0, 1]")
    p_power.add_argument("--format", choices=("json", "csv", "text"), default="text")
    p_power.set_defaults(func=_cmd_power)

    p_sim = sub.add_parser("simulate", help="run the simulation study")
    p_sim.add_argument("--pairs", type=int, required=True)
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--m", type=int, required=True)
    p_sim.add_argument("--theta", type=float, default=DEFAULT_THETA)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--oracle-subset", type=int, default=0, help="records also run through full enumeration")
    p_sim.add_argument("--mc-subset", type=int, default=0, help="records also run through Monte Carlo")
    p_sim.add_argument("--group-size", type=int, default=1000)
    p_sim.add_argument("--no-timings", action="store_true", help="omit timing columns for reproducible bytes")
    p_sim.add_argument("--out", required=True, help="records CSV path")
    p_sim.add_argument("--summary-out", default=None, help="group summaries path (default: OUT.groups.jsonl)")
    p_sim.set_defaults(func=_cmd_simulate)

    p_cal = sub.add_parser("calsim", help="calibration simplex from forecast data")
    p_cal.add_argument("--input", required=True, help="CSV with header p1,p2,p3,outcome")
    p_cal.add_argument("--resolution", type=int, default=10)
    p_cal.add_argument("--min-count", type=int, default=10)
    p_cal.add_argument("--theta", type=float, default=DEFAULT_THETA)
    p_cal.add_argument("--stat", default="llr")
    p_cal.add_argument("--scale", type=float, default=1.0)
    p_cal.add_argument("--svg", required=True)
    p_cal.add_argument("--json", required=True)
    p_cal.set_defaults(func=_cmd_calsim)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ForecastParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
