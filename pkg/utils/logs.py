"""Logging setup for the ``ttfl`` logger hierarchy."""
import logging
from typing import Optional, Union

from rich.console import Console
from rich.logging import RichHandler

LOGGER_NAME = "ttfl"

_handler: Optional[RichHandler] = None


def setup_logging(level: Union[int, str] = logging.WARNING, color: Optional[bool] = None) -> logging.Logger:
    """
    Route ``ttfl`` log records through rich on stderr.

    Calling it again only changes the level; the handler is installed once.

    Args:
        level: Logging level name or number
        color: Force colour on or off; None lets rich detect the terminal

    Returns:
        The ``ttfl`` root logger
    """
    global _handler

    logger = logging.getLogger(LOGGER_NAME)
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.WARNING
    logger.setLevel(level)

    if _handler is None:
        console = Console(stderr=True, force_terminal=color, no_color=color is False)
        _handler = RichHandler(console=console, show_path=False, markup=False, rich_tracebacks=True)
        _handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
        logger.addHandler(_handler)
        logger.propagate = False
    return logger
