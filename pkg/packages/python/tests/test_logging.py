import logging
import sys

from entanglement_atlas.miscellaneous.logging import DATE_FORMAT, LOG_FORMAT, setup_logging


def test_setup_logging_replaces_handlers():
    logger = setup_logging("entanglement_atlas.tests.logging", "debug")
    logger = setup_logging("entanglement_atlas.tests.logging", "WARNING")
    assert len(logger.handlers) == 1
    assert logger.level == logging.WARNING
    handler = logger.handlers[0]
    assert handler.stream is sys.stderr
    assert handler.formatter._fmt == LOG_FORMAT
    assert handler.formatter.datefmt == DATE_FORMAT
