"""Logging system for rough-resonance."""

import logging
import os
import re
from datetime import datetime
from pathlib import Path

LOGGER_NAME = "rough_resonance"

# Matches nan/inf as printed by float, complex and numpy reprs
NON_FINITE_PATTERN = re.compile(r"(?<![A-Za-z_])[+-]?(nan|inf)(j)?(?![A-Za-z_])", re.IGNORECASE)


class NonFiniteFilter(logging.Filter):
    """Filter that flags records reporting NaN or infinite numbers."""

    def filter(self, record: logging.LogRecord) -> bool:
        """Prefix the message when it contains a non-finite number."""
        message = record.getMessage()
        if NON_FINITE_PATTERN.search(message) and not message.startswith("[non-finite]"):
            record.msg = f"[non-finite] {message}"
            record.args = None
        return True


def get_log_dir() -> Path:
    """Get the log directory path."""
    cache_home = os.environ.get("XDG_CACHE_HOME", os.path.expanduser("~/.cache"))
    log_dir = Path(cache_home) / "rough-resonance" / "logs"
    log_dir.mkdir(parents=True, exist_ok=True)
    return log_dir


def get_logger(name: str | None = None) -> logging.Logger:
    """Logger for the package, or for a sub-logger such as 'fem' or 'zerofind'."""
    if name:
        return logging.getLogger(f"{LOGGER_NAME}.{name}")
    return logging.getLogger(LOGGER_NAME)


def init_logging(
    level: str = "INFO",
    log_to_file: bool = True,
    log_to_console: bool = False,
) -> logging.Logger:
    """
    Initialize the package logger for a CLI run.

    Handlers from an earlier call are replaced. The file handler appends to one log per day
    under get_log_dir(); an unknown level falls back to INFO.
    """
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(getattr(logging, level.upper(), logging.INFO))
    for handler in logger.handlers:
        handler.close()
    logger.handlers.clear()

    formatter = logging.Formatter(
        fmt="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )
    handlers: list[logging.Handler] = []
    if log_to_file:
        log_file = get_log_dir() / f"rough_resonance_{datetime.now().strftime('%Y%m%d')}.log"
        handlers.append(logging.FileHandler(log_file))
    if log_to_console:
        handlers.append(logging.StreamHandler())

    non_finite_filter = NonFiniteFilter()
    for handler in handlers:
        handler.setFormatter(formatter)
        handler.addFilter(non_finite_filter)
        logger.addHandler(handler)
    return logger
