import io
import logging

from openbook.logger import get_logger, setup_logging


def test_get_logger():
    logger = get_logger("test")
    assert isinstance(logger, logging.Logger)
    assert logger.name == "test"


def test_get_logger_default():
    logger = get_logger()
    assert logger.name == "openbook"


def test_setup_logging_writes_to_stream():
    stream = io.StringIO()
    setup_logging(level=logging.DEBUG, stream=stream)
    get_logger("openbook.test").debug("reprojecting cotangent point")
    assert "reprojecting cotangent point" in stream.getvalue()
    assert " - openbook.test - DEBUG - " in stream.getvalue()


def test_setup_logging_quiets_jax():
    setup_logging(level=logging.DEBUG, stream=io.StringIO())
    assert logging.getLogger("jax").level == logging.WARNING
