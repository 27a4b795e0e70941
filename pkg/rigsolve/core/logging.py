import logging
import sys

LOG_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"


def configure_logging(level: str = "INFO") -> None:
    """Install one stderr handler on the root logger; calling again replaces it."""
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, "_rigsolve", False):
            root.removeHandler(handler)

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler._rigsolve = True
    root.addHandler(handler)
    root.setLevel(level.upper())
