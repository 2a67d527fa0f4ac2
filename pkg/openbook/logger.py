import logging
import sys


def get_logger(name="openbook"):
    return logging.getLogger(name)


def setup_logging(level=logging.INFO, stream=None):
    # Reports go to stdout, so log records always land on stderr.
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=stream or sys.stderr,
        force=True,
    )
    logging.getLogger("jax").setLevel(max(level, logging.WARNING))
