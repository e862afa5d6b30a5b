import argparse
import logging
import os
import sys
from typing import List, Optional

from quantum_core.errors import ConfigError, SimulationError
from .commands import COMMANDS, run_command
from .config import parse_config

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"


def configure_logging(quiet: bool = False) -> None:
    logging.basicConfig(level=logging.WARNING if quiet else logging.INFO, format=LOG_FORMAT,
                        stream=sys.stderr, force=True)


def _parse_deltas(text: str):
    try:
        deltas = tuple(float(part) for part in text.split(',') if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"--deltas expects comma-separated numbers, got {text!r}")
    if len(deltas) < 4:
        raise argparse.ArgumentTypeError("--deltas needs at least 4 values")
    return deltas


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="pcqc",
        description="Simulate conditional teleportation through a photonic-crystal cavity and its Ramsey readout",
    )
    p.add_argument("command", nargs="?", default="full", choices=sorted(COMMANDS),
                   help="Pipeline step to run (default: full)")
    p.add_argument("--config", help="INI run configuration (defaults when omitted)")
    p.add_argument("--out", help="Output directory")
    p.add_argument("--seed", type=int, help="Shot simulation seed")
    p.add_argument("--deltas", type=_parse_deltas, help="Detunings in rad/s, e.g. 'd1,d2,d3,d4'")
    p.add_argument("--shots", type=int, help="Shots per detuning")
    p.add_argument("--workers", type=int, help="Threads used by the shot simulation")
    p.add_argument("--measurements", help="Measurement CSV (delta, P1) for the tomo command")
    p.add_argument("--quiet", action="store_true", help="Only log warnings and errors")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.quiet)
    try:
        config = parse_config(args.config)
        if args.shots is not None and args.shots < 1:
            raise ConfigError("--shots must be >= 1", field='shots.n_per_delta')
        if args.workers is not None and args.workers < 1:
            raise ConfigError("--workers must be >= 1", field='shots.workers')
        if args.measurements is not None and not os.path.exists(args.measurements):
            raise ConfigError(f"measurement file {args.measurements} does not exist",
                              field='tomography.measurements')
        config = config.with_overrides(**{
            'output.out_dir': args.out,
            'shots.seed': args.seed,
            'shots.n_per_delta': args.shots,
            'shots.workers': args.workers,
            'tomography.deltas': args.deltas,
            'tomography.measurements': args.measurements,
        })
    except SimulationError as exc:
        logger.error("configuration: %s", exc)
        return exc.exit_code
    return run_command(args.command, config)


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
