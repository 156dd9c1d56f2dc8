"""Logging configuration for command-line entry points."""

import logging

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def configure_logging(level: str = "INFO") -> None:
    """
    Configure root logging once for a CLI run.

    Library modules only create module loggers; handlers are installed here.

    Args:
        level: Log level name such as ``"DEBUG"`` or ``"INFO"``

    Raises:
        ValueError: If the level name is unknown
    """
    numeric = logging.getLevelName(level.upper())
    if not isinstance(numeric, int):
        raise ValueError(f"Unknown log level: {level}")
    logging.basicConfig(level=numeric, format=LOG_FORMAT, force=True)
    # matplotlib is chatty at DEBUG
    logging.getLogger("matplotlib").setLevel(max(numeric, logging.WARNING))
