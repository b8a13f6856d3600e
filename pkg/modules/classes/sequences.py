"""
Decreasing sequences a = (a_k) and the sequences a', rho derived from them

Terms are kept exact as coef * 2**exponent with rational coef and exponent,
so geometric families C 2^{-tau k} with non-integral tau still compare exactly.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from typing import Any, Dict, Optional, Sequence, Tuple, Union

from sympy import integer_nthroot

from shared.errors import ConfigError, SequenceDomainError
from shared.logger import get_logger
from shared.rational_utils import format_rational, parse_rational

logger = get_logger()

Number = Union[int, Fraction]


@total_ordering
@dataclass(frozen=True)
class DyadicValue:
    """The positive real coef * 2**exponent"""
    coef: Fraction
    exponent: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "coef", Fraction(self.coef))
        object.__setattr__(self, "exponent", Fraction(self.exponent))
        if self.coef <= 0:
            raise SequenceDomainError(f"Sequence terms must be positive, got {self.coef}")
        if self.exponent.denominator == 1 and self.exponent != 0:
            # Fold integral powers of two into the coefficient
            e = int(self.exponent)
            coef = self.coef * 2 ** e if e > 0 else self.coef / 2 ** (-e)
            object.__setattr__(self, "coef", coef)
            object.__setattr__(self, "exponent", Fraction(0))

    @property
    def is_rational(self) -> bool:
        return self.exponent == 0

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise SequenceDomainError(f"{self} is not rational")
        return self.coef

    def __float__(self) -> float:
        return float(self.coef) * 2.0 ** float(self.exponent)

    def log2(self) -> float:
        return (
            math.log2(self.coef.numerator) - math.log2(self.coef.denominator) + float(self.exponent)
        )

    def __mul__(self, other: Union["DyadicValue", Number]) -> "DyadicValue":
        if isinstance(other, DyadicValue):
            return DyadicValue(self.coef * other.coef, self.exponent + other.exponent)
        return DyadicValue(self.coef * Fraction(other), self.exponent)

    __rmul__ = __mul__

    def __truediv__(self, other: Union["DyadicValue", Number]) -> "DyadicValue":
        if isinstance(other, DyadicValue):
            return DyadicValue(self.coef / other.coef, self.exponent - other.exponent)
        return DyadicValue(self.coef / Fraction(other), self.exponent)

    def __pow__(self, power: int) -> "DyadicValue":
        return DyadicValue(self.coef ** int(power), self.exponent * int(power))

    def _compare(self, other) -> int:
        if isinstance(other, DyadicValue):
            return _cmp_dyadic(self.coef, self.exponent, other.coef, other.exponent)
        other = Fraction(other)
        if other <= 0:
            return 1
        return _cmp_dyadic(self.coef, self.exponent, other, Fraction(0))

    def __eq__(self, other) -> bool:
        if not isinstance(other, (DyadicValue, int, Fraction)):
            return NotImplemented
        return self._compare(other) == 0

    def __lt__(self, other) -> bool:
        return self._compare(other) < 0

    def __hash__(self):
        return hash((self.coef, self.exponent))

    def bracket(self, bits: int = 96) -> Tuple[Fraction, Fraction]:
        """Rationals lo <= value <= hi, equal when the value is rational"""
        if self.is_rational:
            return self.coef, self.coef
        p, q = self.exponent.numerator, self.exponent.denominator
        u, v = self.coef.numerator, self.coef.denominator
        # floor((u^q 2^(p + bits q) / v^q)^(1/q)) = floor(value * 2^bits)
        shift = p + bits * q
        num = u ** q * (2 ** shift if shift > 0 else 1)
        den = v ** q * (2 ** (-shift) if shift < 0 else 1)
        root, exact = integer_nthroot(num // den, q)
        lo = Fraction(int(root), 2 ** bits)
        exact = exact and num % den == 0
        return lo, lo if exact else lo + Fraction(1, 2 ** bits)

    def upper_fraction(self, bits: int = 96) -> Fraction:
        return self.bracket(bits)[1]

    def lower_fraction(self, bits: int = 96) -> Fraction:
        return self.bracket(bits)[0]

    def __repr__(self):
        if self.is_rational:
            return f"DyadicValue({self.coef})"
        return f"DyadicValue({self.coef} * 2^({self.exponent}))"


def _cmp_dyadic(c1: Fraction, e1: Fraction, c2: Fraction, e2: Fraction) -> int:
    """Sign of c1 2^e1 - c2 2^e2 for positive c1, c2"""
    e = e1 - e2
    p, q = e.numerator, e.denominator
    left = c1 ** q
    right = c2 ** q
    if p >= 0:
        left *= 2 ** p
    else:
        right *= 2 ** (-p)
    return (left > right) - (left < right)


@dataclass(frozen=True)
class DecreasingSequence:
    """
    A positive nonincreasing sequence, geometric a_k = C 2^{-tau k} or an
    explicit table. Geometric families are unbounded unless k_max is set.
    """
    kind: str
    C: Optional[Fraction] = None
    tau: Optional[Fraction] = None
    k_max: Optional[int] = None
    values: Tuple[Fraction, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind == "geometric":
            if self.C is None or self.tau is None:
                raise SequenceDomainError("Geometric sequence needs C and tau")
            object.__setattr__(self, "C", Fraction(self.C))
            object.__setattr__(self, "tau", Fraction(self.tau))
            if self.C <= 0:
                raise SequenceDomainError(f"C must be positive, got {self.C}")
            if self.tau < 0:
                raise SequenceDomainError(f"tau must be nonnegative, got {self.tau}")
        elif self.kind == "table":
            values = tuple(Fraction(v) for v in self.values)
            if not values:
                raise SequenceDomainError("Table sequence needs at least one value")
            if any(v <= 0 for v in values):
                raise SequenceDomainError("Table values must be positive")
            for k, (prev, cur) in enumerate(zip(values, values[1:]), start=1):
                if cur > prev:
                    raise SequenceDomainError(
                        f"Table is not nonincreasing at k={k}",
                        {"k": k, "previous": str(prev), "current": str(cur)},
                    )
            object.__setattr__(self, "values", values)
            object.__setattr__(self, "k_max", len(values) - 1)
        else:
            raise SequenceDomainError(f"Unknown sequence kind '{self.kind}'")

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------
    @classmethod
    def geometric(cls, C: Number, tau: Number, k_max: Optional[int] = None, normalize: bool = True) -> "DecreasingSequence":
        C = Fraction(C)
        if normalize and C > 1:
            logger.warning("Normalizing geometric sequence so that a_0 <= 1", {"C": str(C)})
            C = Fraction(1)
        return cls("geometric", C=C, tau=Fraction(tau), k_max=k_max)

    @classmethod
    def table(cls, values: Sequence[Number], normalize: bool = True) -> "DecreasingSequence":
        values = [Fraction(v) for v in values]
        if normalize and values and values[0] > 1:
            logger.warning("Normalizing table sequence so that a_0 <= 1", {"a_0": str(values[0])})
            values = [v / values[0] for v in values]
        return cls("table", values=tuple(values))

    @classmethod
    def from_config(cls, spec: Dict[str, Any]) -> "DecreasingSequence":
        """
        Parse {"type": "geometric", "C": "1/5", "tau": "1"} or
        {"type": "table", "values": ["1", "1/2", ...]}.
        """
        if not isinstance(spec, dict):
            raise ConfigError(f"Sequence spec must be an object, got {spec!r}")
        kind = spec.get("type")
        try:
            if kind == "geometric":
                k_max = spec.get("k_max")
                return cls.geometric(
                    parse_rational(spec["C"]),
                    parse_rational(spec["tau"]),
                    int(k_max) if k_max is not None else None,
                    normalize=spec.get("normalize", True),
                )
            if kind == "table":
                return cls.table([parse_rational(v) for v in spec["values"]], normalize=spec.get("normalize", True))
        except KeyError as e:
            raise ConfigError(f"Sequence spec missing field {e}")
        except SequenceDomainError as e:
            raise ConfigError(str(e), e.details)
        raise ConfigError(f"Unknown sequence type {kind!r}")

    def to_dict(self) -> Dict[str, Any]:
        if self.kind == "geometric":
            doc = {"type": "geometric", "C": format_rational(self.C), "tau": format_rational(self.tau)}
            if self.k_max is not None:
                doc["k_max"] = self.k_max
            return doc
        return {"type": "table", "values": [format_rational(v) for v in self.values]}

    # ------------------------------------------------------------------
    # Evaluation
    # ------------------------------------------------------------------
    def check_domain(self, k: int):
        if k < 0 or (self.k_max is not None and k > self.k_max):
            raise SequenceDomainError(
                f"k={k} outside sequence domain 0..{self.k_max if self.k_max is not None else 'inf'}",
                {"k": k, "k_max": self.k_max},
            )

    def term(self, k: int) -> DyadicValue:
        """a_k, exactly"""
        self.check_domain(k)
        if self.kind == "geometric":
            return DyadicValue(self.C, -self.tau * k)
        return DyadicValue(self.values[k])

    __call__ = term

    def float_value(self, k: int) -> float:
        return float(self.term(k))


def derived_exponents(n: int, d: int, l: int) -> Tuple[int, int]:
    """
    (E, P) with a'_k = 2^{-kE} a_k^P:
    E = n + l(n+1) + (n+1)^2 d l and P = (n+1) l.
    """
    if min(n, d, l) < 1:
        raise SequenceDomainError(f"n, d, l must be >= 1, got {(n, d, l)}")
    return n + l * (n + 1) + (n + 1) ** 2 * d * l, (n + 1) * l


def _transform(a: DecreasingSequence, E: int, power: int) -> DecreasingSequence:
    """k -> 2^{-kE} a_k^power, staying exact"""
    if a.kind == "geometric":
        return DecreasingSequence("geometric", C=a.C ** power, tau=E + a.tau * power, k_max=a.k_max)
    values = tuple(v ** power / Fraction(2) ** (E * k) for k, v in enumerate(a.values))
    return DecreasingSequence("table", values=values)


def derived_sequence(a: DecreasingSequence, n: int, d: int, l: int) -> DecreasingSequence:
    """
    a'_k = 2^{-kn - kl(n+1) - (n+1)^2 kdl} a_k^{(n+1)l}

    Examples:
        >>> derived_sequence(DecreasingSequence.geometric(1, 1), 2, 1, 2).tau
        Fraction(32, 1)
    """
    E, P = derived_exponents(n, d, l)
    return _transform(a, E, P)


@dataclass(frozen=True)
class RhoSequence:
    """rho_k with the index N beyond which rho_k < 1/2"""
    rho: DecreasingSequence
    N: int


def rho_sequence(a: DecreasingSequence, n: int, d: int, l: int, search_limit: int = 10_000) -> RhoSequence:
    """
    rho_k = 2^{-kn - kl(n+1) - (n+1)^2 kdl} a_k^{(n+1)l - 1}, so that a'_k = rho_k a_k.

    N is the smallest k with rho_j < 1/2 for every j >= k in the domain
    (rho is nonincreasing, so the first such k). For a table where no term
    drops below 1/2, N is the table length.
    """
    E, P = derived_exponents(n, d, l)
    rho = _transform(a, E, P - 1)
    half = Fraction(1, 2)
    upper = rho.k_max if rho.k_max is not None else search_limit
    for k in range(0, upper + 1):
        if rho.term(k) < half:
            return RhoSequence(rho, k)
    if rho.kind == "table":
        return RhoSequence(rho, len(rho.values))
    raise SequenceDomainError(f"rho_k stays >= 1/2 up to k={upper}")
