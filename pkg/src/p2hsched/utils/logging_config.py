"""
p2hsched Logging Module.

This module provides optional logging setup for the scheduling engine.
Nothing is printed unless a console or file handler is explicitly installed,
so the package stays quiet when embedded in larger pipelines.
"""

import logging
from datetime import datetime
from logging.handlers import RotatingFileHandler
from pathlib import Path

# Logger for the p2hsched package
logger = logging.getLogger("p2hsched")
logger.propagate = True
logger.setLevel(logging.INFO)

LOG_FORMAT = "[%(asctime)s] [%(levelname)-8s] [%(module)s.%(funcName)s:%(lineno)d] - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
formatter = logging.Formatter(LOG_FORMAT, DATE_FORMAT)

LOG_FILE_MAX_BYTES = 5 * 1024 * 1024
LOG_FILE_BACKUPS = 3


def _resolve_level(log_level: str | int) -> int:
    if isinstance(log_level, int):
        return log_level
    return getattr(logging, log_level.upper(), logging.INFO)


def set_log_level(log_level: str | int) -> None:
    """Change the log level for the logger and every handler attached to it."""
    level = _resolve_level(log_level)
    logger.setLevel(level)
    for handler in logger.handlers:
        handler.setLevel(level)


def enable_file_logging(log_file: str | Path, log_level: str | int = "INFO") -> None:
    """Enable rotating file logging, installing at most one handler per file."""
    log_file = Path(log_file)
    log_file.parent.mkdir(parents=True, exist_ok=True)

    for handler in logger.handlers:
        if isinstance(handler, RotatingFileHandler) and Path(handler.baseFilename) == (
            log_file.resolve()
        ):
            return

    file_handler = RotatingFileHandler(
        log_file, maxBytes=LOG_FILE_MAX_BYTES, backupCount=LOG_FILE_BACKUPS
    )
    file_handler.setLevel(_resolve_level(log_level))
    file_handler.setFormatter(formatter)
    logger.addHandler(file_handler)

    # separator for new runs
    logger.info("=" * 50)
    logger.info("New run started at %s", datetime.now().isoformat())  # noqa: DTZ005
    logger.info("=" * 50)


def init_console_logging(log_level: str | int = "INFO") -> None:
    """Set up console logging for standalone use."""
    if logger.hasHandlers() and logger.handlers:
        set_log_level(log_level)
        return

    console_handler = logging.StreamHandler()
    console_handler.setLevel(_resolve_level(log_level))
    console_handler.setFormatter(formatter)

    logger.addHandler(console_handler)
    logger.setLevel(console_handler.level)
    logger.propagate = False
