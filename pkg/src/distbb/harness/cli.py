"""
Command-line entry point.

Exit codes: 0 success, 1 a run or check failed, 2 bad usage or configuration.
"""

import argparse
import sys

from ..exceptions import ConfigurationError, DistBBError
from .config import load_config
from .presets import PRESETS, run_preset
from .runner import run_experiment
from .verify import run_checks


def build_parser():
    parser = argparse.ArgumentParser(prog="distbb", description="Centralized and distributed BB gradient descent.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment from a YAML config")
    run.add_argument("--config", required=True, metavar="PATH")

    preset = sub.add_parser("preset", help="regenerate a reference experiment")
    preset.add_argument("name", help=f"one of: {', '.join(PRESETS)}")
    preset.add_argument("--out", required=True, metavar="DIR")
    preset.add_argument("--seed", type=int, default=0)

    verify = sub.add_parser("verify", help="run the bound-checking suite")
    verify.add_argument("--seed", type=int, default=0)
    return parser


def _run(args):
    config = load_config(args.config)
    result = run_experiment(config)
    last = result.final
    print(f"wrote {result.csv_path} ({len(result.records)} rounds, final opt_err {last.opt_err:.6g})")
    return 0


def _preset(args):
    for result in run_preset(args.name, args.out, seed=args.seed):
        print(f"wrote {result.csv_path} (final opt_err {result.final.opt_err:.6g})")
    return 0


def _verify(args):
    results = run_checks(seed=args.seed)
    for res in results:
        print(res.line())
    return 0 if all(r.passed for r in results) else 1


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse has already printed usage; it uses 2 for errors, 0 for --help
        return exc.code or 0
    handler = {"run": _run, "preset": _preset, "verify": _verify}[args.command]
    try:
        return handler(args)
    except (ConfigurationError, OSError) as exc:
        print(f"distbb: error: {exc}", file=sys.stderr)
        return 2
    except DistBBError as exc:
        print(f"distbb: failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
