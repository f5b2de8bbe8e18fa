"""Command-line entry point: run, describe, and real-dataset experiments.

Exit codes: 0 on success, 1 on configuration/validation errors, 2 when some
graph instances failed but the sweep produced partial results.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .experiment import ConfigError, ExperimentConfig, describe, run_experiment, run_real_dataset


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="taskgsp",
        description="Task-aware sampling and reconstruction experiments on graph signals",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("run", "run the synthetic experiment sweep and write the result CSV"),
        ("describe", "print the resolved plan for a config without computing"),
        ("real", "run the real-dataset pathway on a graph file plus signal CSV"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="path to a key = value config file")
        p.add_argument("--seed", type=int, help="override the master seed")
        p.add_argument("--out", help="override the output CSV path")
        p.add_argument("--trials", type=int, help="override the MC trial count")
        p.add_argument("--threads", type=int, default=1, help="parallel graph instances")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = _build_parser().parse_args(argv)
    try:
        config = ExperimentConfig.from_file(args.config).with_overrides(
            seed=args.seed, output=args.out, trials=args.trials
        )
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    try:
        if args.command == "describe":
            print(describe(config))
            return 0
        if args.command == "run":
            summary = run_experiment(config, threads=max(1, args.threads))
        else:
            summary = run_real_dataset(config)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    print(f"wrote {summary.rows_written} rows to {summary.output}")
    for note in summary.notes:
        print(note)
    for graph_id, message in summary.failures:
        print(f"graph {graph_id} failed: {message}", file=sys.stderr)
    return summary.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
