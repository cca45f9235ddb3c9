"""Command-line entry points: run, report, list-problems."""
from __future__ import annotations

import argparse
import sys

import yaml

from .catalog import catalog as catalog_entries
from .bench import ReportError, config_from_dict, report, run_benchmark


def _cmd_run(args) -> int:
    data = {}
    if args.config:
        with open(args.config) as fh:
            data = yaml.safe_load(fh) or {}
    if args.seed is not None:
        data["seed"] = args.seed
    if args.output_dir is not None:
        data["output_dir"] = args.output_dir
    config = config_from_dict(data)
    out = run_benchmark(config)
    print(f"benchmark written to {out}")
    return 0


def _cmd_report(args) -> int:
    try:
        report(args.output_dir)
    except ReportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def _cmd_list(args) -> int:
    for entry in catalog_entries():
        p = entry.problem
        print(f"{p.name:10} m={p.m} n={p.n} p={p.p}  ({entry.source_note})")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="mosqp-bench",
                                     description="multi-objective SQP benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a benchmark grid")
    run_p.add_argument("--config", help="YAML config file (all keys optional)")
    run_p.add_argument("--seed", type=int, help="override the config seed")
    run_p.add_argument("--output-dir", help="override the output directory")
    run_p.set_defaults(func=_cmd_run)

    rep_p = sub.add_parser("report", help="summarize a benchmark output directory")
    rep_p.add_argument("output_dir")
    rep_p.set_defaults(func=_cmd_report)

    list_p = sub.add_parser("list-problems", help="list catalog problems")
    list_p.set_defaults(func=_cmd_list)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
