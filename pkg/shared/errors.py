"""Exception hierarchy shared by every module and mapped to CLI exit codes"""

from typing import Any, Dict, Optional

# Exit codes of the command-line front-end
EXIT_OK = 0
EXIT_BOUND_VIOLATED = 2
EXIT_BUDGET = 3
EXIT_CONFIG = 4


class ArithDensityError(Exception):
    """Base class for all errors raised by arith-density"""

    exit_code = EXIT_CONFIG

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """Machine-readable form written by the CLI on failure"""
        return {
            "error": self.message,
            "type": type(self).__name__,
            "exit_code": self.exit_code,
            "details": self.details,
        }


class ConfigError(ArithDensityError):
    """Run configuration failed schema validation"""


class BudgetExceeded(ArithDensityError):
    """An enumeration or sampling budget ran out before a certified answer"""

    exit_code = EXIT_BUDGET


class DimensionMismatch(ArithDensityError):
    """Operands live in different ambient dimensions"""


class DegreeOverflow(ArithDensityError):
    """A wedge product would exceed the top degree"""


class RankDeficient(ArithDensityError):
    """Basis rows are linearly dependent"""


class SequenceDomainError(ArithDensityError):
    """Sequence evaluated outside its domain or violating its invariants"""


class PreconditionFailed(ArithDensityError):
    """An operation was called outside its stated preconditions"""


class NotCertifiable(ArithDensityError):
    """Interval certification could not establish a bound"""


class DegenerateFit(ArithDensityError):
    """A regression had too few usable points"""


class BoundViolated(ArithDensityError):
    """A verified inequality failed"""

    exit_code = EXIT_BOUND_VIOLATED
