"""Core package: configuration, logging and the saddle-point numerics."""

from core.config import load_config
from core.exceptions import NumericalFailureError, ToolkitError
from core.logging import setup_logging, get_logger

__all__ = [
    'NumericalFailureError',
    'ToolkitError',
    'get_logger',
    'load_config',
    'setup_logging',
]
