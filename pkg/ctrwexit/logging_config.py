"""Logging setup for ctrwexit: one package logger plus per-solver debug channels.

Every module logs to ``ctrwexit.<module>``. A channel is one of those
child loggers switched to DEBUG on its own, so a sweep can trace the
Nyström condition numbers or the Talbot contour without drowning in the
debug output of every other solver.
"""

from __future__ import annotations

import logging
import sys
from collections.abc import Iterable

from ctrwexit.exceptions import ConfigError

PACKAGE_LOGGER = "ctrwexit"

# Modules that emit debug records worth following on their own
DEBUG_CHANNELS = (
    "renewal",
    "laplace",
    "nystrom",
    "favorable",
    "adverse",
    "twosided",
    "continuum",
    "montecarlo",
    "runner",
)

LEVELS = {
    "DEBUG": logging.DEBUG,
    "INFO": logging.INFO,
    "WARNING": logging.WARNING,
    "ERROR": logging.ERROR,
}

CONSOLE_FORMAT = "%(levelname)s: %(message)s"
CHANNEL_CONSOLE_FORMAT = "%(levelname)s [%(name)s]: %(message)s"
FILE_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def setup_logging(
    level: str = "INFO",
    log_file: str | None = None,
    channels: Iterable[str] = (),
) -> logging.Logger:
    """Configure the ctrwexit logger and return it.

    Args:
        level: DEBUG, INFO, WARNING or ERROR for the whole package. Unknown
            names fall back to INFO.
        log_file: Also write records, with timestamps and logger names, here.
        channels: Solver modules (see DEBUG_CHANNELS) logged at DEBUG
            regardless of ``level``.

    Raises:
        ConfigError: If a channel is not one of DEBUG_CHANNELS

    Example:
        >>> setup_logging("DEBUG")  # Solver routes, grid sizes, condition numbers
        >>> setup_logging("INFO", "sweep.log")  # Progress on console and in a file
        >>> setup_logging("WARNING", channels=["nystrom"])  # Only the Nyström trace
    """
    selected = list(dict.fromkeys(channels))
    unknown = [name for name in selected if name not in DEBUG_CHANNELS]
    if unknown:
        raise ConfigError(
            f"Unknown debug channel(s) {', '.join(unknown)}; "
            f"expected one of {', '.join(DEBUG_CHANNELS)}",
            key="debug",
        )

    logger = logging.getLogger(PACKAGE_LOGGER)
    logger.setLevel(LEVELS.get(level.upper(), logging.INFO))

    # Repeated calls (one per CLI run in a test session) must not stack handlers
    logger.handlers.clear()
    for name in DEBUG_CHANNELS:
        child = logging.getLogger(f"{PACKAGE_LOGGER}.{name}")
        child.setLevel(logging.DEBUG if name in selected else logging.NOTSET)

    # stderr keeps stdout free for CSV output
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(
        logging.Formatter(CHANNEL_CONSOLE_FORMAT if selected else CONSOLE_FORMAT)
    )
    logger.addHandler(console_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(logging.Formatter(FILE_FORMAT))
        logger.addHandler(file_handler)

    logger.propagate = False
    return logger
