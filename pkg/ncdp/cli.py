"""
ncdp-sim command line.

    ncdp-sim run <config-file> [--set key=value ...] [--out file.csv] [--seed N] [--workers N]
    ncdp-sim validate <config-file> [--set key=value ...]
    ncdp-sim list

Exit codes: 0 success, 2 configuration or simulation error, 1 anything else.
"""

import argparse
import logging
import sys
import traceback
from pathlib import Path
from typing import List, Optional

from ncdp import config as settings
from ncdp.exceptions import NcdpError
from ncdp.experiments import ExecutionOptions, ExperimentRegistry, load_config, run, validate
from ncdp.utils.logging_config import setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2


def _add_config_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("config", nargs="?", default=None, help="key=value experiment file")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override one config key (repeatable)")
    parser.add_argument("--seed", type=int, default=None, help="master seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncdp-sim",
        description="Network-coded diversity protocol simulator",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--log-level", default=settings.LOG_LEVEL, help="logging level")
    parser.add_argument("--log-file", default=settings.LOG_FILE, help="optional rotating log file")
    parser.add_argument("--debug", action="store_true", help="print full tracebacks")
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="run an experiment and write its CSV")
    _add_config_args(run_parser)
    run_parser.add_argument("--out", default=None,
                            help="CSV path, '-' for standard output (default: <output dir>/<experiment>.csv)")
    run_parser.add_argument("--workers", type=int, default=settings.WORKERS, help="worker processes")
    run_parser.add_argument("--no-progress", action="store_true", help="hide the progress bar")

    validate_parser = sub.add_parser("validate", help="check a configuration without running it")
    _add_config_args(validate_parser)

    sub.add_parser("list", help="list the registered experiments")
    return parser


def _cmd_list() -> int:
    for spec in ExperimentRegistry.specs():
        required = f" (needs {', '.join(spec.requires)})" if spec.requires else ""
        print(f"{spec.name:<24} sweep={spec.sweep:<8} {spec.description}{required}")
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    cfg = load_config(args.config, args.overrides, args.seed)
    diagnostics = validate(cfg)
    for d in diagnostics:
        print(str(d), file=sys.stderr)
    if any(d.severity == "error" for d in diagnostics):
        return EXIT_CONFIG
    print(f"{cfg.experiment}: ok ({cfg.fingerprint[:12]})")
    return EXIT_OK


def _cmd_run(args: argparse.Namespace) -> int:
    execution = ExecutionOptions(workers=max(args.workers, 1),
                                 progress=settings.SHOW_PROGRESS and not args.no_progress)
    cfg = load_config(args.config, args.overrides, args.seed, execution)
    to_stdout = args.out == "-"
    out = None if to_stdout else Path(args.out or settings.DEFAULT_OUTPUT_DIR / f"{cfg.experiment}.csv")
    result = run(cfg, out=out)
    if to_stdout:
        result.to_frame().to_csv(sys.stdout, index=False, float_format="%.10g", lineterminator="\n")
    else:
        print(result.output, file=sys.stderr)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level, args.log_file)
    if args.debug:
        settings.set_debug(True)

    try:
        if args.command == "list":
            return _cmd_list()
        if args.command == "validate":
            return _cmd_validate(args)
        return _cmd_run(args)
    except NcdpError as e:
        print(f"error: {e}", file=sys.stderr)
        if settings.is_debug():
            traceback.print_exc()
        return EXIT_CONFIG
    except Exception as e:  # noqa: BLE001
        logger.error("unexpected failure: %s", e)
        if settings.is_debug():
            traceback.print_exc()
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
