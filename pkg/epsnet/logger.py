"""Logger configuration"""

import logging
import sys

from dataclasses import dataclass


@dataclass
class LogColors:
    """
    Class for colorized logging levels.

    Attributes
    ----------
    RESET : str
        Reset color (None)
    INFO : str
        Info level color (Green)
    WARNING : str
        Warning level color (Yellow)
    ERROR : str
        Error level color (Red)
    DEBUG : str
        Debug level color (Blue)
    """

    RESET = "\x1b[0m"
    INFO = "\x1b[32m"  # Green
    WARNING = "\x1b[33m"  # Yellow
    ERROR = "\x1b[31m"  # Red
    DEBUG = "\x1b[34m"  # Blue


LEVEL_COLORS = {
    logging.DEBUG: LogColors.DEBUG,
    logging.INFO: LogColors.INFO,
    logging.WARNING: LogColors.WARNING,
    logging.ERROR: LogColors.ERROR,
}


class CustomFormatter(logging.Formatter):
    """Logging formatter that colors the level name, optionally."""

    def __init__(self, fmt: str, datefmt: str, use_color: bool = True):
        super().__init__(fmt, datefmt=datefmt)
        self.use_color = use_color

    def format(self, record):
        if self.use_color:
            color = LEVEL_COLORS.get(record.levelno, LogColors.RESET)
            record = logging.makeLogRecord(record.__dict__)
            record.levelname = f"{color}{record.levelname}{LogColors.RESET}"

        return super().format(record)


def configure_logging(debug: bool = False) -> None:
    """Configure colorized logging on stderr.

    Parameters
    ----------
    debug : bool, optional
        Enable debug mode (default: False).

    Notes
    -----
    Log lines go to stderr so that ``gen`` and ``build`` can stream
    point files and net JSON on stdout. Colors are dropped when stderr
    is not a terminal.
    """
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(
        CustomFormatter(
            "[%(levelname)s] %(asctime)s - %(name)s - %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S",
            use_color=sys.stderr.isatty(),
        )
    )

    logging.basicConfig(
        level=logging.INFO if not debug else logging.DEBUG,
        handlers=[handler],
        force=True,
    )
