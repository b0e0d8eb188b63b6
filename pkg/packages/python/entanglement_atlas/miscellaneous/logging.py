"""
Logging Module.

Logs go to stderr only, so the JSON, CSV and text reports the CLI writes to stdout stay
machine readable.
"""

import logging
import sys

LOG_FORMAT = "[%(asctime)s] - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def setup_logging(module: str, loglevel: str = 'INFO') -> logging.Logger:
    """
    Attach a single stderr handler to a logger, replacing any handler set up before.

    The CLI calls it once for the package logger:

    ```python
    from entanglement_atlas.miscellaneous.logging import setup_logging

    logger = setup_logging("entanglement_atlas", settings.logging.level)
    ```

    Library modules only ask for their own logger:

    ```python
    logger = logging.getLogger(__name__)
    ```

    Args:
        module (str): logger name, usually the package name
        loglevel (str): `DEBUG`, `INFO`, `WARNING`, `ERROR` or `CRITICAL`, any case

    Returns:
        logging.Logger: the configured logger
    """
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT))

    logger = logging.getLogger(module)
    for previous in list(logger.handlers):
        logger.removeHandler(previous)
    logger.addHandler(handler)
    logger.setLevel(loglevel.upper())
    return logger
