import logging
import sys
from contextlib import contextmanager

from config.harness_config import LOG_LEVEL

_console_handlers: list[logging.StreamHandler] = []


def setup_logger(name: str = "dualspace", level: int | str | None = None) -> logging.Logger:
    """
    Set up a logger with console output

    Args:
        name: Logger name
        level: Logging level (default: DUALSPACE_LOG_LEVEL, INFO when unset)

    Returns:
        Configured logger instance
    """
    if level is None:
        level = LOG_LEVEL
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.INFO

    logger = logging.getLogger(name)
    logger.setLevel(level)

    # Avoid adding multiple handlers if logger already exists
    if not logger.handlers:
        console_handler = logging.StreamHandler(sys.stdout)
        console_handler.setLevel(level)

        formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )
        console_handler.setFormatter(formatter)

        logger.addHandler(console_handler)
        _console_handlers.append(console_handler)

    return logger


@contextmanager
def console_to(stream):
    """
    Point every console handler at `stream` for the duration of the block

    Args:
        stream: Text stream, e.g. sys.stderr while a report goes to stdout
    """
    previous = [handler.stream for handler in _console_handlers]
    for handler in _console_handlers:
        handler.setStream(stream)
    try:
        yield
    finally:
        for handler, original in zip(_console_handlers, previous):
            handler.setStream(original)
