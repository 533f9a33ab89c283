"""
Logging setup module.
One rotating log file for every qwalk run plus a quiet stderr console; each
record carries the subcommand that produced it.
"""

import logging
from logging.handlers import RotatingFileHandler
from pathlib import Path
import sys

LOG_FORMAT = '%(asctime)s [%(levelname)s] [%(command)s] [%(name)s] %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'


class CommandFilter(logging.Filter):
    """Stamps records with the active subcommand."""

    def __init__(self, command: str):
        super().__init__()
        self.command = command

    def filter(self, record: logging.LogRecord) -> bool:
        record.command = self.command
        return True


def resolve_level(name: str) -> int:
    """
    Map a level name such as "info" or "WARNING" to its numeric value.

    Raises:
        ValueError: If the name is not a standard logging level
    """
    level = logging.getLevelName(str(name).upper())
    if not isinstance(level, int):
        raise ValueError(f"unknown log level: {name!r}")
    return level


def setup_logger(logging_config, command: str = "qwalk") -> logging.Logger:
    """
    Configure the root logger for one CLI invocation.

    Args:
        logging_config: LoggingConfig with file path, rotation and levels
        command: Subcommand name written into every record

    Returns:
        Configured root logger

    Raises:
        ValueError: If either configured level is unknown
    """
    file_level = resolve_level(logging_config.level)
    console_level = resolve_level(logging_config.console_level)

    log_file = Path(logging_config.file)
    log_file.parent.mkdir(parents=True, exist_ok=True)

    logger = logging.getLogger()
    logger.setLevel(min(file_level, console_level))
    # Repeated run() calls in one process must not stack handlers
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)
    tag = CommandFilter(command)

    file_handler = RotatingFileHandler(
        filename=log_file,
        maxBytes=logging_config.max_bytes,
        backupCount=logging_config.backup_count,
        encoding='utf-8'
    )
    console_handler = logging.StreamHandler(sys.stderr)  # stdout carries the JSON summary
    for handler, level in ((file_handler, file_level), (console_handler, console_level)):
        handler.setLevel(level)
        handler.setFormatter(formatter)
        handler.addFilter(tag)
        logger.addHandler(handler)

    return logger


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(name)
