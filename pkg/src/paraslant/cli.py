"""Command-line entry point: ``paraslant run`` and ``paraslant list-checks``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .catalog import format_table
from .errors import ConfigError, ToolkitError
from .report import CheckReport
from .runner import run_scenario
from .scenario import load_source

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="paraslant",
                                description="Numerical verification of almost paracontact submanifold geometry.")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario file or builtin:NAME")
    run.add_argument("scenario", help="path to a JSON scenario, or builtin:NAME")
    run.add_argument("--seed", type=int, help="override the sampling seed")
    run.add_argument("--points", type=_positive_int, help="number of sample points")
    run.add_argument("--tol", type=float, help="tolerance applied to every check")
    run.add_argument("--format", choices=("json", "text"), default="json")
    run.add_argument("--out", type=Path, help="write the report here instead of stdout")
    run.add_argument("--jobs", type=_positive_int, default=1, help="worker threads")
    sub.add_parser("list-checks", help="print every check id with its statement and anchor")
    return p


def render(report: CheckReport, fmt: str) -> str:
    return report.to_json() if fmt == "json" else report.to_text()


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list-checks":
        sys.stdout.write(format_table())
        return EXIT_OK
    try:
        scenario = load_source(args.scenario)
        report = run_scenario(scenario, seed=args.seed, points=args.points, tol=args.tol, jobs=args.jobs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ToolkitError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = render(report, args.format)
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_FAIL if report.failed else EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
