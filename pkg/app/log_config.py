"""
Logging setup
Root logger level and optional file handler come from settings
"""
import logging
import os
from typing import Optional

from app.config import settings

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: Optional[str] = None) -> None:
    """Configure the root logger once per process"""
    level_name = (level or settings.LOG_LEVEL).upper()
    handlers = [logging.StreamHandler()]

    if settings.LOG_FILE:
        log_dir = os.path.dirname(settings.LOG_FILE)
        if log_dir and not os.path.exists(log_dir):
            os.makedirs(log_dir)
        handlers.append(logging.FileHandler(settings.LOG_FILE))

    logging.basicConfig(level=level_name, format=LOG_FORMAT, handlers=handlers, force=True)
