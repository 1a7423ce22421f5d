"""Command-line entry point: one subcommand per verifiable identity."""

from __future__ import annotations

import argparse
import os
import sys

from .experiments import EXPERIMENTS, ExperimentConfig
from .reports import emit

OUTPUT_DIR_ENV = "STABLEFPT_OUT"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="verify",
        description=(
            "Monte Carlo verification of first-passage laws of stable "
            "processes: each subcommand checks one closed-form identity "
            "against simulation and writes report.json / data.csv / plot.gp."
        ),
    )
    parser.add_argument("--config", help="JSON config file", default=None)
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads (1 = bit-reproducible)")
    parser.add_argument("--out", default=None,
                        help=f"output directory (also via ${OUTPUT_DIR_ENV})")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        sub.add_parser(name, help=f"run the {name} check")
    sub.add_parser("all", help="run every check")
    return parser


def _resolve_config(args) -> ExperimentConfig:
    if args.config:
        cfg = ExperimentConfig.from_json(args.config)
    else:
        cfg = ExperimentConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    if args.threads is not None:
        if args.threads < 1:
            raise SystemExit("--threads must be >= 1")
        cfg.threads = args.threads
    out = args.out or os.environ.get(OUTPUT_DIR_ENV)
    if out:
        cfg.output_dir = out
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = _resolve_config(args)

    names = list(EXPERIMENTS) if args.experiment == "all" else [args.experiment]
    all_passed = True
    for name in names:
        runner = EXPERIMENTS[name]
        report = runner(cfg)
        out_dir = (
            os.path.join(cfg.output_dir, name) if len(names) > 1
            else cfg.output_dir
        )
        emit(report, out_dir)
        status = "PASS" if report.passed else "FAIL"
        print(
            f"[{status}] {name}: censored={report.censored_fraction:.4f} "
            f"runtime={report.runtime_seconds:.1f}s -> {out_dir}"
        )
        for label, value, threshold in report.discrepancies:
            print(f"    {label}: {value:.6g} (threshold {threshold:.6g})")
        all_passed = all_passed and report.passed
    return 0 if all_passed else 1


if __name__ == "__main__":
    sys.exit(main())
