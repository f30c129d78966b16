"""Command-line front end.

Usage::

    squeezed-trajectories <subcommand> --config <path> [--out <path>]
        [--seed <u64>] [--dt <f>] [--trajectories <n>]

Subcommands are the scheme names.  Exit status: 0 success, 2 configuration
error, 3 integration or physicality error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from .config import SCHEMES, parse_config
from .errors import ConfigError, IntegrationError, SimulationError
from .runner import run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INTEGRATION = 3
EXIT_IO = 4


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="squeezed-trajectories",
        description="Gaussian quantum trajectories of a cavity mode driven by squeezed fields.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log warnings and progress")
    sub = parser.add_subparsers(dest="command", required=True, metavar="subcommand")
    for name in SCHEMES:
        p = sub.add_parser(name, help=f"run the {name} scheme")
        p.add_argument("--config", required=True, help="configuration file (key = value)")
        p.add_argument("--out", help="CSV output path (overrides output_path)")
        p.add_argument("--seed", type=_u64, help="override the seed")
        p.add_argument("--dt", type=float, help="override the time step")
        p.add_argument("--trajectories", type=_positive_int, help="override the ensemble size")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        cfg = parse_config(text)
        if cfg.scheme != args.command:
            raise ConfigError(
                f"config file declares scheme {cfg.scheme!r} but subcommand is {args.command!r}"
            )
        if args.trajectories is not None and cfg.scheme != "ensemble":
            raise ConfigError("--trajectories only applies to the ensemble subcommand")
        cfg = cfg.with_overrides(seed=args.seed, dt=args.dt, trajectories=args.trajectories)
        result = run(cfg, out=args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationError as exc:
        print(f"integration error: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    sys.stdout.write(result.summary)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
