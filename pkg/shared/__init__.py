"""Shared utilities package"""

from .errors import ArithDensityError, BoundViolated, BudgetExceeded, ConfigError
from .logger import get_logger
from .rational_utils import parse_rational, parse_real

__all__ = [
    'ArithDensityError',
    'BoundViolated',
    'BudgetExceeded',
    'ConfigError',
    'get_logger',
    'parse_rational',
    'parse_real',
]
