"""
Configuration module: environment-driven settings and structured logging.
"""
from .settings import Settings, settings
from .logging import configure_logging, get_logger

__all__ = [
    "Settings",
    "settings",
    "configure_logging",
    "get_logger",
]
