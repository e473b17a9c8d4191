"""Command-line entry point: ``twoshock <command> [--config PATH] [--out DIR]``.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from . import experiments as ex
from .config import ConfigError, load_config
from .gas import DomainError
from .profiles import ProfileError
from .riemann import StructureError
from .shifts import ShiftInvariantError
from .solver import BlowUpError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

COMMANDS = {
    "profile": lambda cfg, out, threads: ex.run_profile(cfg, out),
    "simulate": lambda cfg, out, threads: ex.run_simulate(cfg, out),
    "contract": lambda cfg, out, threads: ex.run_contract(cfg, out),
    "limit": ex.run_limit,
    "poincare": ex.run_poincare,
    "check": lambda cfg, out, threads: ex.run_check(cfg, out),
}

NUMERIC_ERRORS = (ex.NumericalFailure, BlowUpError, ProfileError, StructureError,
                  ShiftInvariantError, DomainError, ArithmeticError)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="twoshock", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config; may name a 'preset' to start from")
        p.add_argument("--preset", help="preset name (overrides the config's)")
        p.add_argument("--out", default=f"runs/{name}", help="output directory")
        p.add_argument("--seed", type=int, help="random seed (overrides the config)")
        p.add_argument("--threads", type=int, default=1, help="worker processes for sweeps")
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = {}
    if args.seed is not None:
        if args.seed < 0:
            print("error: --seed must be non-negative", file=sys.stderr)
            return EXIT_CONFIG
        overrides["seed"] = args.seed
    if args.preset:
        overrides["preset"] = args.preset
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        doc = COMMANDS[args.command](cfg, out, args.threads)
    except NUMERIC_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"{args.command}: {doc['status']} ({out / 'summary.json'})")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
