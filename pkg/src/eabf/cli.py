"""Command-line interface for the experiment runner.

    eabf run {wave,deconv,heat1d,heat2d,rates} [--config PATH] [--seed N] [--out DIR]
    eabf budget --sigma S --m M [--b B] [--tail T]
    eabf rates --which {n,k,lemma} [--seed N] [--out DIR]

Exit status is 0 on success; failures print one machine-readable JSON error
record to stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .budget import fm_tolerance
from .errors import EabfError
from .experiments import RUNNERS, default_config, load_config


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eabf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment and write its report")
    run.add_argument("experiment", choices=sorted(RUNNERS))
    run.add_argument("--config", help="JSON config file (defaults per experiment)")
    run.add_argument("--seed", type=int, help="override the config seed")
    run.add_argument("--out", help="report directory (default runs/<experiment>)")

    budget = sub.add_parser("budget", help="print the forward-map tolerance K")
    budget.add_argument("--sigma", type=float, required=True)
    budget.add_argument("--m", type=int, required=True)
    budget.add_argument("--b", type=float, default=1.0 / 20.0)
    budget.add_argument("--tail", type=float, default=0.0)
    budget.add_argument("--rho0", type=float, default=1.0 / math.sqrt(2.0 * math.pi),
                        help="standardized density at zero (default: Gaussian)")

    rates = sub.add_parser("rates", help="run a subset of the rate verifications")
    rates.add_argument("--which", choices=["n", "k", "lemma"], action="append",
                       help="repeatable; default: all three")
    rates.add_argument("--seed", type=int)
    rates.add_argument("--out", help="report directory (default runs/rates)")

    return parser


def _cmd_run(args) -> int:
    cfg = load_config(args.config, args.experiment) if args.config else default_config(args.experiment)
    if args.seed is not None:
        cfg.seed = args.seed
        cfg.validate()
    out = args.out or f"runs/{args.experiment}"
    summary = RUNNERS[args.experiment](cfg, out)
    json.dump(summary, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return 0


def _cmd_budget(args) -> int:
    K = fm_tolerance(args.sigma, args.m, args.b, args.tail, args.rho0)
    print(K)
    return 0


def _cmd_rates(args) -> int:
    cfg = default_config("rates")
    if args.which:
        cfg.which = tuple(dict.fromkeys(args.which))
    if args.seed is not None:
        cfg.seed = args.seed
    cfg.validate()
    summary = RUNNERS["rates"](cfg, args.out or "runs/rates")
    json.dump(summary, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "budget":
            return _cmd_budget(args)
        return _cmd_rates(args)
    except EabfError as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports everything
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
