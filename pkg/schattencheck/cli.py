""" Command-line interface for schattencheck. """

import argparse
import asyncio
import logging
import pathlib
import sys

from schattencheck.config import EXPERIMENTS, ConfigError, ExperimentConfig, load_config
from schattencheck.dyadic import DyadicError
from schattencheck.experiments import RUNNERS, ExperimentError
from schattencheck.haar import HaarError
from schattencheck.operators import OperatorError
from schattencheck.report import Report, ReportError, emit
from schattencheck.schatten import SchattenError
from schattencheck.sequences import SequenceError
from schattencheck.spaces import SpaceError
from schattencheck.weights import WeightError


LIBRARY_ERRORS = (
    DyadicError,
    ExperimentError,
    HaarError,
    OperatorError,
    SchattenError,
    SequenceError,
    SpaceError,
    WeightError,
)


def read_args(argv: list[str] | None = None) -> argparse.Namespace:
    """
    Parse command-line arguments.

    Returns:
        The parsed command-line arguments.
    """
    parser = argparse.ArgumentParser(
        description="Check two-weight Schatten-class characterizations of "
        "Riesz transform commutators on periodic grids."
    )

    parser.add_argument(
        "-c",
        "--config",
        type=pathlib.Path,
        default=None,
        help="the JSON configuration file; defaults reproduce the standard families",
    )
    parser.add_argument(
        "-e",
        "--experiment",
        choices=(*EXPERIMENTS, "all"),
        default="all",
        help="the experiment to run",
    )
    parser.add_argument(
        "-o",
        "--out",
        type=pathlib.Path,
        default=None,
        help="the directory to write reports to",
    )
    parser.add_argument("--seed", type=int, default=None, help="the random seed")
    parser.add_argument(
        "--workers",
        type=int,
        default=None,
        help="the number of concurrently running cells",
    )
    parser.add_argument(
        "--plots", action="store_true", default=None, help="also draw SVG plots"
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="log progress; repeat for debugging output",
    )

    return parser.parse_args(argv)


def exit_fatal(msg: str) -> None:
    """
    Print an error message to standard error and exit with code 1.

    Args:
        msg: The error message to print.
    """
    sys.exit(f"Fatal: {msg}")


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    """
    Build the configuration from a file and command-line overrides.

    Raises:
        ConfigError: If the configuration is invalid.
    """
    overrides = {
        "seed": args.seed,
        "workers": args.workers,
        "plots": args.plots,
        "out": None if args.out is None else str(args.out),
    }
    if args.config is None:
        return ExperimentConfig.from_dict({}, **overrides)
    return load_config(args.config, **overrides)


async def run(config: ExperimentConfig, experiments: list[str]) -> list[Report]:
    """
    Run experiments one after the other.

    Args:
        config: The configuration.
        experiments: The experiment names, in run order.

    Returns:
        One report per experiment.
    """
    return [await RUNNERS[experiment](config) for experiment in experiments]


async def main(config: ExperimentConfig, experiments: list[str]) -> None:
    """
    Core of schattencheck.

    Args:
        config: The configuration.
        experiments: The experiments to run.
    """
    try:
        reports = await run(config, experiments)
    except (ConfigError, *LIBRARY_ERRORS) as exc:
        exit_fatal(f"{exc}.")

    out = pathlib.Path(config.out)
    for report in reports:
        try:
            written = emit(report, out, config.plots)
        except ReportError as exc:
            exit_fatal(f"{exc}.")
        label = report.experiment + ":"
        print(f"{label:<13} {len(report.rows):>6} rows, {len(written):>4} files")
    print(f"Output:       {out}")


def wrapper() -> None:
    """
    Entry point for schattencheck.
    """
    args = read_args()
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        config = build_config(args)
    except ConfigError as exc:
        exit_fatal(f"{exc}.")

    experiments = list(EXPERIMENTS) if args.experiment == "all" else [args.experiment]

    try:
        asyncio.run(main(config, experiments))
    except KeyboardInterrupt:
        # Gracefully abort.
        pass
