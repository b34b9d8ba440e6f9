"""Logging configuration for MarkerNav."""
import logging
from datetime import datetime
from typing import Optional

from rich.logging import RichHandler

from src.core.exceptions import ConfigurationError
from src.utils.config import Config

LOGGER_NAME = "markernav"
FILE_FORMAT = "%(asctime)s %(levelname)-8s %(name)s %(message)s"


def parse_level(name: str) -> int:
    """Map a LOG_LEVEL name to its numeric level."""
    level = logging.getLevelName(str(name).upper())
    if not isinstance(level, int):
        raise ConfigurationError(f"Unknown LOG_LEVEL {name!r}")
    return level


def log_file_name(stage: Optional[str] = None, now: Optional[datetime] = None) -> str:
    """Timestamped log file name, tagged with the CLI stage when given."""
    timestamp = (now or datetime.now()).strftime("%Y%m%d_%H%M%S")
    if stage:
        return f"{LOGGER_NAME}_{stage}_{timestamp}.log"
    return f"{LOGGER_NAME}_{timestamp}.log"


def setup_logging(config: Config, stage: Optional[str] = None) -> logging.Logger:
    """
    Configure the markernav logger.

    The console gets a RichHandler at LOG_LEVEL; a DEBUG file handler
    writes to LOG_DIR, never to a run's output directory, so artifacts
    stay byte-identical across runs with the same seed.

    Args:
        config: Process configuration (log level and directory)
        stage: CLI stage name used to tag the log file

    Returns:
        Configured logger

    Raises:
        ConfigurationError: If LOG_LEVEL is not a logging level name
    """
    level = parse_level(config.log_level)
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(min(level, logging.DEBUG))
    for handler in list(logger.handlers):
        handler.close()
        logger.removeHandler(handler)

    console_handler = RichHandler(rich_tracebacks=True, markup=False, show_time=False)
    console_handler.setLevel(level)
    console_handler.setFormatter(logging.Formatter("%(message)s"))
    logger.addHandler(console_handler)

    log_file = config.log_dir / log_file_name(stage)
    log_file.parent.mkdir(parents=True, exist_ok=True)
    file_handler = logging.FileHandler(log_file)
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(logging.Formatter(FILE_FORMAT, datefmt="%Y-%m-%d %H:%M:%S"))
    logger.addHandler(file_handler)

    logger.debug(f"Logging to {log_file} (console level {logging.getLevelName(level)})")
    return logger
