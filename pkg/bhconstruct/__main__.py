#!/usr/bin/env python3
"""
Main entry point for bhconstruct
"""

import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from bhconstruct import APP_NAME, MIN_PYTHON_VERSION, __version__
from bhconstruct.config import Config
from bhconstruct.constants import ConfigKeys, ExitCode, PathPattern
from bhconstruct.errors import InputError
from bhconstruct.core.pipeline import Pipeline, RunConfig, build_parser

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(verbosity: int = 0, log_file: Optional[Path] = None) -> None:
    """
    Configure application logging

    The report owns stdout, so log records go to stderr. A file handler is
    added when log_file is given.
    """
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file is not None:
        log_file = Path(log_file)
        log_file.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file, encoding='utf-8'))

    logging.basicConfig(level=level, format=LOG_FORMAT, handlers=handlers, force=True)


def default_log_file() -> Path:
    return Path.home() / PathPattern.LOG_DIR / PathPattern.LOG_FILE


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main application entry point"""
    if sys.version_info < MIN_PYTHON_VERSION:
        print(f"{APP_NAME} requires Python {'.'.join(map(str, MIN_PYTHON_VERSION))} or higher",
              file=sys.stderr)
        return int(ExitCode.INPUT_ERROR)

    args = build_parser().parse_args(argv)
    config = Config(args.config) if args.config else Config()

    log_file = args.log_file
    if log_file is None and config.get(ConfigKeys.Logging.ENABLE_FILE, False):
        log_file = default_log_file()
    setup_logging(args.verbose, log_file)
    logger = logging.getLogger(__name__)
    logger.info(f"Starting {APP_NAME} {__version__}: {args.subcommand}")

    try:
        run_config = RunConfig.from_config(
            config,
            precision_bits=args.precision_bits,
            verbosity=args.verbose,
            timing=args.timing,
            report_out=args.output,
            workers=getattr(args, 'workers', None),
        )
    except InputError as e:
        logger.error(str(e))
        return int(ExitCode.INPUT_ERROR)

    report = Pipeline(run_config).run(args)
    text = report.csv_text if report.csv_text is not None else report.render()
    if run_config.report_out:
        try:
            run_config.report_out.write_text(text, encoding='utf-8')
        except OSError as e:
            logger.error(f"Cannot write report to {run_config.report_out}: {e}")
            return int(ExitCode.INPUT_ERROR)
        logger.info(f"Report written to {run_config.report_out}")
    else:
        sys.stdout.write(text)
    return int(report.exit_code)


if __name__ == "__main__":
    sys.exit(main())
