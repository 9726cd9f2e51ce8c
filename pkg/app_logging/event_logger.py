import logging
import os

from dotenv import load_dotenv

from utils.paths import logs_dir

load_dotenv()

_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def _level_from_env() -> int:
    """
    Log level from BUNDLENEG_LOG_LEVEL (e.g. DEBUG, INFO, WARNING).
    Falls back to INFO for missing or unknown names.
    """
    name = os.getenv("BUNDLENEG_LOG_LEVEL", "INFO").strip().upper()
    level = logging.getLevelName(name)
    return level if isinstance(level, int) else logging.INFO


def get_logger(
    name: str,
    filename: str = "negotiation.log",
    console: bool = True,
) -> logging.Logger:
    """
    Return a logger with a file handler and console handler.

    By default logs go to negotiation.log, but a different filename can be
    passed to separate channels, for example sessions.log. Channels with
    console=False only write to their file.
    """
    logger = logging.getLogger(name)
    if logger.handlers:
        # Logger already configured
        return logger

    level = _level_from_env()
    logger.setLevel(level)
    logger.propagate = False

    file_handler = logging.FileHandler(logs_dir() / filename, encoding="utf-8")
    file_handler.setLevel(level)

    formatter = logging.Formatter(_FORMAT)
    file_handler.setFormatter(formatter)
    logger.addHandler(file_handler)

    if console:
        console_handler = logging.StreamHandler()
        console_handler.setLevel(max(level, logging.INFO))
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

    return logger
