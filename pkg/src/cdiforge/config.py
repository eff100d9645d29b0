"""Environment configuration and logging setup."""

import logging
import os
import sys
from pathlib import Path

from dotenv import load_dotenv

from cdiforge.errors import ConfigError

load_dotenv()

LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


class Config:
    """Environment defaults; config files and command-line flags override these."""

    # Logging
    LOG_LEVEL = os.getenv("CDI_FORGE_LOG", "warn").lower()
    LOG_FORMAT = "%(asctime)s %(name)s %(levelname)s %(message)s"

    # Runs
    OUT_DIR = Path(os.getenv("CDI_FORGE_OUT", "out"))
    THREADS = os.getenv("CDI_FORGE_THREADS", "1")

    # Files written next to every run's outputs
    RESOLVED_CONFIG_NAME = "resolved_config.json"
    INVOCATION_NAME = "invocation.json"
    MANIFEST_NAME = "manifest.json"


def configure_logging(level: str | None = None) -> None:
    """Send package logs to standard error at the requested verbosity.

    Args:
        level: One of error, warn, info, debug. Defaults to ``CDI_FORGE_LOG``.
    """
    name = (level or Config.LOG_LEVEL).lower()
    if name not in LOG_LEVELS:
        raise ConfigError(f"CDI_FORGE_LOG must be one of {sorted(LOG_LEVELS)}, got {name!r}")

    root = logging.getLogger("cdiforge")
    root.setLevel(LOG_LEVELS[name])
    # one handler, bound to whatever stderr is current
    for old in list(root.handlers):
        root.removeHandler(old)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(Config.LOG_FORMAT))
    root.addHandler(handler)
    root.propagate = False


def default_threads() -> int:
    """Worker threads from ``CDI_FORGE_THREADS``.

    Raises:
        ConfigError: if the value is not a positive integer.
    """
    try:
        threads = int(Config.THREADS)
    except ValueError:
        threads = 0
    if threads < 1:
        raise ConfigError(f"CDI_FORGE_THREADS must be a positive integer, got {Config.THREADS!r}")
    return threads


def load_environment() -> None:
    """Check the environment defaults and set up logging."""
    configure_logging()
    default_threads()
