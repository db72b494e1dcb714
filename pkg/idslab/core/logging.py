"""Console logging: bracketed component tag on standard error."""

import logging
import sys

_FORMAT = "[%(name)s] %(levelname)s %(message)s"


def configure_logging(level: str = "INFO") -> None:
    root = logging.getLogger("idslab")
    root.setLevel(level.upper())
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(_FORMAT))
    root.addHandler(handler)
    root.propagate = False


def get_logger(component: str) -> logging.Logger:
    return logging.getLogger(f"idslab.{component}")
