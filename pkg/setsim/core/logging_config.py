"""
Logging Configuration Module
Centralized logging for the setsim package.
"""

import logging
import sys

ROOT_LOGGER_NAME = "setsim"


def setup_logging(level: int = logging.INFO, enable_console: bool = True) -> None:
    """
    Configure the ``setsim`` logger tree.

    Args:
        level: Logging level (default: INFO)
        enable_console: Emit records on stderr (default: True)
    """
    root_logger = logging.getLogger(ROOT_LOGGER_NAME)
    root_logger.setLevel(level)

    # Drop existing handlers to avoid duplicates on repeated CLI calls
    root_logger.handlers.clear()

    formatter = logging.Formatter(
        '%(asctime)s | %(levelname)-8s | %(name)s:%(funcName)s:%(lineno)d | %(message)s',
        datefmt='%H:%M:%S'
    )

    # stderr, so tables written to stdout stay clean
    if enable_console:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(level)
        console_handler.setFormatter(formatter)
        root_logger.addHandler(console_handler)


def get_logger(name: str) -> logging.Logger:
    """
    Return the logger for a module.

    Args:
        name: Module name (e.g. 'setsim.core.kernels')

    Returns:
        Configured logger
    """
    return logging.getLogger(name)


def level_from_name(name: str) -> int:
    """Map 'DEBUG' / 'info' / ... to a logging level, defaulting to WARNING."""
    level = logging.getLevelName(name.upper())
    return level if isinstance(level, int) else logging.WARNING


# Log levels as constants for convenience
DEBUG = logging.DEBUG
INFO = logging.INFO
WARNING = logging.WARNING
ERROR = logging.ERROR
