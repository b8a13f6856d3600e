"""Core functionality for arith-density runs"""

from .config import apply_cli_overrides, load_config, validate_run_config
from .pipeline import run_command
from .display import display_artifacts, display_run_summary, get_display_parameters

__all__ = [
    'load_config',
    'apply_cli_overrides',
    'validate_run_config',
    'run_command',
    'display_run_summary',
    'display_artifacts',
    'get_display_parameters',
]
