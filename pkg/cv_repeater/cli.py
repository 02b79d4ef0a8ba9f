"""
Command-line interface for the CV repeater models.

Subcommands:
- fig3:   maximum two-link fidelity against channel transmission
- fig4:   success probability at a fixed fidelity target
- fig5:   chain fidelity bound at fixed entanglement strength
- table1: fidelity and success probability for 200, 400 and 800 km
- link:   one link, optionally cross-checked by the oracle, and its chain
- sweep:  custom sweep over eta or chi
- verify: the invariant suite; exit code 0 only if every check passes

Results are CSV on stdout or in --out. Flags may also come from a flat
KEY=VALUE file (--config or CV_REPEATER_CONFIG); explicit flags win.
"""

import argparse
import logging
import sys
from collections.abc import Sequence

import polars as pl

from cv_repeater.client import RepeaterClient
from cv_repeater.config import load_run_config
from cv_repeater.core.figures import DEFAULT_ETA_GRID, render_table1
from cv_repeater.exceptions import RepeaterError
from cv_repeater.models.config import RunConfig
from cv_repeater.utils import to_csv_text, write_csv

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_ERROR = 2

# Options that only shape the invocation and never reach RunConfig
_CLI_ONLY = ("command", "config", "verbose", "debug")


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # every default is None so that config-file values are not overridden
    common.add_argument("--eta", type=float, help="Channel power transmission in (0, 1]")
    common.add_argument("--chi", type=float, help="EPR entanglement strength in [0, 1)")
    gain = common.add_mutually_exclusive_group()
    gain.add_argument("--gain", type=float, help="Amplifier gain g")
    gain.add_argument(
        "--gain-tuned", action="store_true", default=None, help="Use g = eta^(-1/4) / chi at every point"
    )
    common.add_argument("--kind", choices=["scissors", "optimal"], help="Amplifier kind (default: scissors)")
    common.add_argument("--order", type=int, help="Amplifier truncation order N (default: 1)")
    common.add_argument("--links", type=int, help="Number of links M, a power of two (default: 2)")
    common.add_argument("--atten-db-per-km", type=float, help="Fibre attenuation (default: 0.2)")
    common.add_argument("--f-target", type=float, help="Fidelity target (default: 0.99)")
    common.add_argument("--per-link", action="store_true", default=None, help="Apply --f-target to one link")
    common.add_argument("--grid", help="Sweep grid start:stop:points[:log|lin]")
    common.add_argument("--sweep-over", choices=["eta", "chi"], help="Swept parameter for 'sweep' (default: eta)")
    common.add_argument("--out", help="Write the CSV to this path instead of stdout")
    common.add_argument("--oracle", action="store_true", default=None, help="Cross-check with the brute-force oracle")
    common.add_argument("--workers", type=int, help="Threads for independent grid points (default: 1)")
    common.add_argument("--config", help="Flat KEY=VALUE file with default flag values")
    common.add_argument("--verbose", "-v", action="store_true", help="Enable INFO logging")
    common.add_argument("--debug", action="store_true", help="Enable DEBUG logging")
    return common


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cv-repeater",
        description="Continuous-variable quantum repeater with noiseless linear amplification",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  cv-repeater fig3 --grid 0.001:0.9:60:log --out fig3.csv
  cv-repeater fig4 --f-target 0.99 --per-link
  cv-repeater table1
  cv-repeater link --eta 0.01 --chi 0.1 --gain-tuned --links 8 --oracle
  cv-repeater sweep --sweep-over chi --eta 0.01 --grid 0.01:0.5:25 --gain-tuned --order 2
  cv-repeater verify --workers 4
        """,
    )
    common = _common_options()
    subparsers = parser.add_subparsers(dest="command", required=True, help="Commands")
    subparsers.add_parser("fig3", parents=[common], help="Maximum two-link fidelity vs transmission")
    subparsers.add_parser("fig4", parents=[common], help="Success probability at fixed fidelity")
    subparsers.add_parser("fig5", parents=[common], help="Chain fidelity at fixed entanglement strength")
    subparsers.add_parser("table1", parents=[common], help="Fidelity and success probability for 200-800 km")
    subparsers.add_parser("link", parents=[common], help="Evaluate one link and its chain")
    subparsers.add_parser("sweep", parents=[common], help="Custom sweep over eta or chi")
    subparsers.add_parser("verify", parents=[common], help="Run the invariant suite")
    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    if args.debug:
        level = logging.DEBUG
    elif args.verbose:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s: %(message)s")


def _emit(df: pl.DataFrame, config: RunConfig) -> None:
    if config.out is None:
        sys.stdout.write(to_csv_text(df))
        return
    path = write_csv(df, config.out)
    logger.info("Wrote %d rows to %s", df.height, path)


def cmd_fig3(client: RepeaterClient, config: RunConfig) -> int:
    _emit(client.figures.fig3(config.grid or DEFAULT_ETA_GRID), config)
    return EXIT_OK


def cmd_fig4(client: RepeaterClient, config: RunConfig) -> int:
    df = client.figures.fig4(config.grid or DEFAULT_ETA_GRID, config.f_target, per_link=config.per_link)
    _emit(df, config)
    return EXIT_OK


def cmd_fig5(client: RepeaterClient, config: RunConfig) -> int:
    chi = 0.1 if config.chi is None else config.chi
    _emit(client.figures.fig5(config.grid or DEFAULT_ETA_GRID, chi, config.order), config)
    return EXIT_OK


def cmd_table1(client: RepeaterClient, config: RunConfig) -> int:
    df = client.figures.table1()
    print(render_table1(df), file=sys.stderr)
    _emit(df, config)
    return EXIT_OK


def cmd_link(client: RepeaterClient, config: RunConfig) -> int:
    assert config.eta is not None and config.chi is not None  # checked by RunConfig
    params = client.links.params(config.eta, config.chi, kind=config.kind, order=config.order, gain=config.gain)
    _emit(client.figures.link(params, config.links, oracle=config.oracle), config)
    return EXIT_OK


def cmd_sweep(client: RepeaterClient, config: RunConfig) -> int:
    assert config.grid is not None  # checked by RunConfig
    df = client.figures.sweep(
        config.grid,
        sweep_over=config.sweep_over,
        eta=config.eta,
        chi=config.chi,
        kind=config.kind,
        order=config.order,
        gain=config.gain,
        links=config.links,
    )
    _emit(df, config)
    return EXIT_OK


def cmd_verify(client: RepeaterClient, config: RunConfig) -> int:
    report = client.verify.run()
    _emit(report, config)
    if client.verify.passed(report):
        logger.info("All %d checks passed", report.height)
        return EXIT_OK
    failed = report.filter(~pl.col("passed"))["name"].to_list()
    print(f"FAILED: {', '.join(failed)}", file=sys.stderr)
    return EXIT_CHECK_FAILED


COMMANDS = {
    "fig3": cmd_fig3,
    "fig4": cmd_fig4,
    "fig5": cmd_fig5,
    "table1": cmd_table1,
    "link": cmd_link,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


def run(config: RunConfig) -> int:
    """Executes a validated configuration and returns the exit code."""
    logger.info("Running %s", config.command)
    code = COMMANDS[config.command](RepeaterClient(config.settings), config)
    logger.info("Finished %s with exit code %d", config.command, code)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    """CLI entry point."""
    parser = create_parser()
    args = parser.parse_args(argv)
    _configure_logging(args)

    flags = {k: v for k, v in vars(args).items() if k not in _CLI_ONLY}
    try:
        config = load_run_config(args.command, flags, args.config)
        return run(config)
    except RepeaterError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
