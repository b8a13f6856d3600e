"""Exact rational parsing, formatting and continued-fraction snapping"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, List, Union

import sympy
from sympy.ntheory.continued_fraction import (
    continued_fraction_convergents,
    continued_fraction_iterator,
)

from shared.errors import ConfigError

RationalLike = Union[int, Fraction, str]

# Names accepted in coordinate specs besides sympy syntax
_REAL_ALIASES = {
    "phi": "GoldenRatio",
    "golden": "GoldenRatio",
    "golden_ratio": "GoldenRatio",
}


@dataclass(frozen=True)
class SnappedValue:
    """An exact rational standing in for a (possibly irrational) real"""
    value: Fraction
    radius: float
    source: str

    @property
    def exact(self) -> bool:
        return self.radius == 0.0


def parse_rational(value: Any, allow_float: bool = False) -> Fraction:
    """
    Parse an exact rational.

    Accepts ints, Fractions and strings of the form "p/q" or "p"; floats only
    when allow_float is set (every double is an exact dyadic rational).

    Examples:
        >>> parse_rational("1/5")
        Fraction(1, 5)
        >>> parse_rational(3)
        Fraction(3, 1)
    """
    if isinstance(value, bool):
        raise ConfigError(f"Expected a rational, got boolean {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not allow_float or not math.isfinite(value):
            raise ConfigError(f"Rationals must be given as \"p/q\" strings, got {value!r}")
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as e:
            raise ConfigError(f"Invalid rational {value!r}: {e}")
    raise ConfigError(f"Expected a rational, got {type(value).__name__}")


def format_rational(value: Fraction) -> str:
    """Serialize as "p/q" (denominator always written)"""
    return f"{value.numerator}/{value.denominator}"


def format_float(value: float) -> str:
    """Serialize a float with 17 significant digits"""
    return f"{float(value):.17g}"


def best_approximations(value: Any, bits: int = 128) -> List[Fraction]:
    """
    Continued-fraction convergents of a real with denominator below 2**bits.

    The real is first evaluated to roughly twice the requested precision so
    that every returned convergent is a convergent of the true value.
    """
    expr = _to_sympy(value)
    if expr.is_Rational:
        exact = sympy.Rational(expr)
    else:
        digits = int(math.ceil(2 * bits * math.log10(2))) + 20
        exact = sympy.Rational(sympy.N(expr, digits))

    limit = 2 ** bits
    convergents = []
    for conv in continued_fraction_convergents(continued_fraction_iterator(exact)):
        q = int(conv.q)
        if q >= limit:
            break
        convergents.append(Fraction(int(conv.p), q))
    return convergents


def parse_real(value: Any, bits: int = 128) -> SnappedValue:
    """
    Parse a coordinate: exact rationals stay exact, other reals are snapped to
    the last continued-fraction convergent with denominator below 2**bits.

    Examples:
        >>> parse_real("1/2").value
        Fraction(1, 2)
        >>> parse_real("(1+sqrt(5))/2", bits=8).value
        Fraction(377, 233)
    """
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return SnappedValue(Fraction(value), 0.0, str(value))
    if isinstance(value, float):
        return SnappedValue(parse_rational(value, allow_float=True), 0.0, repr(value))
    if not isinstance(value, str):
        raise ConfigError(f"Cannot parse real coordinate {value!r}")

    try:
        return SnappedValue(Fraction(value.strip()), 0.0, value)
    except (ValueError, ZeroDivisionError):
        pass

    expr = _to_sympy(value)
    convergents = best_approximations(expr, bits)
    if not convergents:
        raise ConfigError(f"No convergent of {value!r} fits in {bits} bits")
    snapped = convergents[-1]
    radius = abs(sympy.N(expr - sympy.Rational(snapped.numerator, snapped.denominator), 20))
    return SnappedValue(snapped, float(radius), value)


def _to_sympy(value: Any) -> sympy.Expr:
    if isinstance(value, sympy.Expr):
        return value
    if isinstance(value, Fraction):
        return sympy.Rational(value.numerator, value.denominator)
    text = str(value).strip()
    text = _REAL_ALIASES.get(text.lower(), text)
    try:
        expr = sympy.sympify(text, rational=True)
    except (sympy.SympifyError, TypeError, SyntaxError) as e:
        raise ConfigError(f"Cannot parse real expression {value!r}: {e}")
    if expr.free_symbols or expr.is_real is False:
        raise ConfigError(f"Coordinate expression {value!r} is not a real constant")
    return expr
