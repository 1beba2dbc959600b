"""Command-line experiment runner.

Commands:
  run    --config PATH [--trace PATH] [--summary PATH]
  sweep  --config PATH --budgets 32,64,128,...
  suite  NAME            (convex_rates | strongly_convex_rates | online_regret | holder_checks)
  report --dir PATH      (render figures for traces and sweep summaries)

Exit codes: 0 success, 1 criterion failure, 2 configuration error.
HOLDEROPT_THREADS caps sweep parallelism.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .acceptance import SUITES, run_suite
from .config import ConfigError, load_config
from .experiments import atomic_write, run_experiment, sweep_budgets, write_outputs


def _max_workers() -> int:
    raw = os.environ.get("HOLDEROPT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _cmd_run(args) -> int:
    try:
        config = load_config(args.config)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.trace:
        config.trace_path = args.trace
    if args.summary:
        config.summary_path = args.summary
    result = run_experiment(config)
    write_outputs(result)
    final = result.summary.get("final_suboptimality")
    shown = "n/a" if final is None else f"{final:.6e}"
    print(
        f"{config.algorithm}: rounds={result.summary['rounds']} "
        f"queries={result.summary['total_queries']} final_subopt={shown}"
    )
    return 0


def _cmd_sweep(args) -> int:
    try:
        config = load_config(args.config)
        budgets = [int(b) for b in args.budgets.split(",") if b.strip()]
        if not budgets or any(b < 1 for b in budgets):
            raise ConfigError("budgets must be positive integers")
    except (ConfigError, OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    aggregate = sweep_budgets(config, budgets, max_workers=_max_workers())
    if args.aggregate:
        atomic_write(args.aggregate, json.dumps(aggregate, indent=2, sort_keys=True) + "\n")
    slope = aggregate.get("loglog_slope")
    print(f"sweep over {budgets}: slope={'n/a' if slope is None else f'{slope:.4f}'}")
    return 0


def _cmd_suite(args) -> int:
    if args.name not in SUITES:
        print(f"config error: unknown suite {args.name!r}; choose from {sorted(SUITES)}",
              file=sys.stderr)
        return 2
    results = run_suite(args.name)
    failures = 0
    for result in results:
        print(result.line())
        if not result.passed:
            failures += 1
    if failures:
        print(f"{failures} criterion(s) failed", file=sys.stderr)
        return 1
    return 0


def _cmd_report(args) -> int:
    from .report import render_directory

    written = render_directory(args.dir)
    for path in written:
        print(f"wrote {path}")
    if not written:
        print("no renderable outputs found", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="holderopt", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment from a config file")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--trace", help="override output.trace_path")
    p_run.add_argument("--summary", help="override output.summary_path")
    p_run.set_defaults(fn=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run the config across budgets")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--budgets", required=True, help="comma-separated budgets")
    p_sweep.add_argument("--aggregate", help="path for the aggregate JSON record")
    p_sweep.set_defaults(fn=_cmd_sweep)

    p_suite = sub.add_parser("suite", help="run a named acceptance suite")
    p_suite.add_argument("name")
    p_suite.set_defaults(fn=_cmd_suite)

    p_report = sub.add_parser("report", help="render figures for outputs in a directory")
    p_report.add_argument("--dir", required=True)
    p_report.set_defaults(fn=_cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
