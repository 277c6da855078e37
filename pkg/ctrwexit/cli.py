"""CLI entry point for ctrwexit."""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from ctrwexit.config import (
    CONFIG_ENV_VAR,
    RunConfig,
    default_config_path,
    load_config,
    parse_value,
)
from ctrwexit.exceptions import (
    ConfigError,
    CoverageError,
    CTRWError,
    DomainError,
    ModelError,
    NumericalFailureError,
    RegimeError,
    SimulationError,
    UnsupportedOperationError,
)
from ctrwexit.logging_config import DEBUG_CHANNELS, setup_logging
from ctrwexit.runner import (
    PROPERTIES,
    ExitTimeRunner,
    ResultRow,
    figure_configs,
    load_rows,
    rows_to_csv,
    save_rows,
    sweep_configs,
    sweep_file_name,
    verify_property,
)

logger = logging.getLogger("ctrwexit.cli")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_VERIFICATION = 4

USAGE_ERRORS = (
    ConfigError,
    DomainError,
    RegimeError,
    ModelError,
    UnsupportedOperationError,
    CoverageError,
)
NUMERICAL_ERRORS = (NumericalFailureError, SimulationError)

# Module docstring for --help
__doc__ = f"""
ctrwexit - Mean exit times of a drifting continuous-time random walk

Usage:
    # Favorable regime on the default grid, closed form where available
    ctrwexit compute

    # Adverse regime with large jumps at three observation times
    ctrwexit compute --regime adverse --set jump_rate=4 --r 0,0.4,10 --out adverse.csv

    # Monte Carlo estimates at x = 0.5
    ctrwexit simulate --x 0.5 --paths 1000000 --seed 7 --workers 4

    # Every applicable method against every other
    ctrwexit compare --config fig1.conf --paths 100000

    # Data behind the published curves, one CSV per parameter set
    ctrwexit sweep figures --out results/

    # One run per value of a key
    ctrwexit sweep --param jump_rate --values 0.1,1,4 --regime adverse --out results/

    # Qualitative property of a computed CSV
    ctrwexit verify adverse.csv --property interior-maximum

    # Trace only the Nyström solves
    ctrwexit compute --regime adverse --debug nystrom

Configuration is a key=value file given by --config or ${CONFIG_ENV_VAR};
flags override file values. Exit codes: 0 success, 2 usage or
configuration error, 3 numerical failure, 4 verification failure.

For full documentation, see README.md
"""


def _logging_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    parent.add_argument("--quiet", "-q", action="store_true", help="Errors only")
    parent.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    parent.add_argument("--log-file", default=None, help="Also write the log to this file")
    parent.add_argument(
        "--debug",
        action="append",
        default=[],
        choices=DEBUG_CHANNELS,
        metavar="CHANNEL",
        help=f"Debug one solver module regardless of level ({', '.join(DEBUG_CHANNELS)})",
    )
    return parent


def _run_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", default=None, help="key=value run configuration file")
    parent.add_argument("--out", default=None, help="Output CSV (or directory for sweep)")
    parent.add_argument("--workers", type=int, default=None, help="Monte Carlo worker threads")
    parent.add_argument("--regime", default=None, help="favorable, adverse, twosided, continuum")
    parent.add_argument("--method", default=None, help="auto, closed-form, ..., monte-carlo, all")
    parent.add_argument("--x", dest="x_grid", default=None, help="start:stop:count or a,b,c")
    parent.add_argument("--r", dest="r_list", default=None, help="Observation times, inf allowed")
    parent.add_argument("--paths", default=None, help="Monte Carlo paths")
    parent.add_argument("--seed", default=None, help="Monte Carlo root seed")
    parent.add_argument("--tolerance", default=None, help="Analytic agreement tolerance")
    parent.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override any configuration key (repeatable)",
    )
    return parent


def build_parser() -> argparse.ArgumentParser:
    logging_parent = _logging_parent()
    run_parent = _run_parent()
    parser = argparse.ArgumentParser(
        prog="ctrwexit",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    commands = parser.add_subparsers(dest="command", required=True)

    parents = [logging_parent, run_parent]
    commands.add_parser("compute", parents=parents, help="Analytic mean exit times as CSV")
    commands.add_parser("simulate", parents=parents, help="Monte Carlo estimates as CSV")
    commands.add_parser("compare", parents=parents, help="Cross-check every applicable method")

    sweep = commands.add_parser("sweep", parents=parents, help="Runs over a parameter range")
    sweep.add_argument("preset", nargs="?", choices=["figures"], help="Named parameter sets")
    sweep.add_argument("--param", default=None, help="Configuration key to vary")
    sweep.add_argument("--values", default=None, help="Comma-separated values of --param")

    verify = commands.add_parser("verify", parents=[logging_parent], help="Check a CSV property")
    verify.add_argument("csv", help="Result CSV from compute")
    verify.add_argument("--property", dest="prop", required=True, choices=PROPERTIES)
    return parser


def _log_level(args: argparse.Namespace) -> str:
    if args.verbose:
        return "DEBUG"
    if args.quiet:
        return "ERROR"
    if args.log_level:
        return str(args.log_level).upper()
    return "INFO"


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the config file, then flags.

    Raises:
        ConfigError: If the file or a flag value is invalid
    """
    config = RunConfig()
    path = args.config or default_config_path()
    if path:
        config = load_config(path)
        logger.info(f"✅ Loaded configuration from: {path}")

    values = {}
    for key in ("regime", "method", "x_grid", "r_list", "paths", "seed", "tolerance"):
        text = getattr(args, key, None)
        if text is not None:
            values[key] = parse_value(key, str(text))
    for item in args.overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got: {item}")
        key, text = item.split("=", 1)
        values[key.strip()] = parse_value(key.strip(), text)
    if args.workers is not None:
        values["workers"] = args.workers
    if args.out is not None:
        values["output"] = args.out
    return config.replace(**values)


def _emit(rows: Sequence[ResultRow], output: str | None) -> None:
    if output:
        save_rows(rows, output)
    else:
        sys.stdout.write(rows_to_csv(rows))


def cmd_compute(config: RunConfig) -> int:
    rows = ExitTimeRunner(config).compute()
    _emit(rows, config.output)
    logger.info(f"✅ Computed {len(rows)} rows")
    return EXIT_OK


def cmd_simulate(config: RunConfig) -> int:
    rows = ExitTimeRunner(config).simulate()
    _emit(rows, config.output)
    logger.info(f"✅ Simulated {len(rows)} points with {config.paths} paths each")
    return EXIT_OK


def cmd_compare(config: RunConfig) -> int:
    report = ExitTimeRunner(config).compare()
    text = report.to_text()
    if config.output:
        Path(config.output).write_text(text)
        logger.info(f"💾 Saved comparison: {config.output}")
    else:
        sys.stdout.write(text)
    failures = report.failures
    if failures:
        logger.error(f"❌ {len(failures)} of {len(report.entries)} comparisons failed")
        for entry in failures[:10]:
            logger.error(
                f"   x={entry.x:.6g} {entry.first} vs {entry.second}: "
                f"|Δ|={abs(entry.difference):.3g} > {entry.allowed:.3g}"
            )
        return EXIT_VERIFICATION
    logger.info(f"✅ All {len(report.entries)} comparisons passed")
    return EXIT_OK


def cmd_sweep(config: RunConfig, args: argparse.Namespace) -> int:
    if args.preset == "figures":
        configs = figure_configs(config)
    elif args.param and args.values:
        configs = sweep_configs(config, args.param, args.values.split(","))
    else:
        raise ConfigError("sweep needs the 'figures' preset or --param KEY --values a,b,c")

    out_dir = Path(config.output or "sweep")
    out_dir.mkdir(parents=True, exist_ok=True)
    logger.info(f"🔄 Sweep of {len(configs)} runs into {out_dir}/")
    for label, run_config in configs.items():
        rows = ExitTimeRunner(run_config).compute()
        save_rows(rows, out_dir / sweep_file_name(label))
    return EXIT_OK


def cmd_verify(csv_path: str, prop: str) -> int:
    checks = verify_property(load_rows(csv_path), prop)
    holds = all(check.holds for check in checks)
    for check in checks:
        status = "true" if check.holds else "false"
        sys.stdout.write(f"{check.prop},{check.method},{status}\n")
    return EXIT_OK if holds else EXIT_VERIFICATION


def run(args: argparse.Namespace) -> int:
    if args.command == "verify":
        return cmd_verify(args.csv, args.prop)
    config = resolve_config(args)
    if args.command == "compute":
        return cmd_compute(config)
    if args.command == "simulate":
        return cmd_simulate(config)
    if args.command == "compare":
        return cmd_compare(config)
    return cmd_sweep(config, args)


def main(argv: Sequence[str] | None = None) -> None:
    args = build_parser().parse_args(argv)

    # Setup logging
    setup_logging(_log_level(args), args.log_file, args.debug)

    try:
        code = run(args)
    except USAGE_ERRORS as e:
        logger.error(f"❌ Error: {e}")
        sys.exit(EXIT_USAGE)
    except NUMERICAL_ERRORS as e:
        logger.error(f"❌ Error: {e}")
        for key, value in e.details.items():
            logger.error(f"   {key}: {value}")
        sys.exit(EXIT_NUMERICAL)
    except CTRWError as e:
        logger.error(f"❌ Error: {e}")
        sys.exit(EXIT_USAGE)
    except KeyboardInterrupt:
        logger.error("\n❌ Interrupted")
        sys.exit(130)
    sys.exit(code)


if __name__ == "__main__":
    main()
