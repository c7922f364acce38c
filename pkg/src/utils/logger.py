"""
Logging setup
"""
import logging
import sys
from typing import Optional

from ..config.settings import QG_LOG_LEVEL

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"


def configure_logging(level: Optional[str] = None):
    """Route library logs to stderr; stdout stays reserved for results"""
    logging.basicConfig(
        level=getattr(logging, (level or QG_LOG_LEVEL).upper(), logging.WARNING),
        format=LOG_FORMAT,
        stream=sys.stderr,
        force=True,
    )
