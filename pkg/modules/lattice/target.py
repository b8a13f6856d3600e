"""Target vectors alpha in R^n with exact rational coordinates, and integer-vector helpers"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Tuple

import numpy as np

from shared.errors import ConfigError, DimensionMismatch, PreconditionFailed
from shared.rational_utils import parse_real

IntVector = Tuple[int, ...]


@dataclass(frozen=True)
class TargetVector:
    """
    alpha = (alpha_1, ..., alpha_n) with exact rational coordinates.

    Irrational inputs are snapped to continued-fraction convergents;
    snap_radius bounds |alpha_j - alpha_j(true)| over all coordinates.
    """
    coordinates: Tuple[Fraction, ...]
    snap_radius: float = 0.0
    sources: Tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        coords = tuple(Fraction(c) for c in self.coordinates)
        if not coords:
            raise ConfigError("Target vector needs at least one coordinate")
        object.__setattr__(self, "coordinates", coords)
        if not self.sources:
            object.__setattr__(self, "sources", tuple(str(c) for c in coords))

    @classmethod
    def from_spec(cls, values: Sequence, bits: int = 128) -> "TargetVector":
        """
        Build from config entries ("p/q" strings, ints or sympy expressions).

        Examples:
            >>> TargetVector.from_spec(["1", "1/2"]).coordinates
            (Fraction(1, 1), Fraction(1, 2))
        """
        if isinstance(values, (str, bytes)) or not isinstance(values, Sequence):
            raise ConfigError(f"Target vector must be a list, got {values!r}")
        snapped = [parse_real(v, bits) for v in values]
        return cls(
            tuple(s.value for s in snapped),
            max(s.radius for s in snapped) if snapped else 0.0,
            tuple(s.source for s in snapped),
        )

    @property
    def n(self) -> int:
        return len(self.coordinates)

    @property
    def float_shadow(self) -> np.ndarray:
        return np.array([float(c) for c in self.coordinates])

    @property
    def common_denominator(self) -> int:
        d = 1
        for c in self.coordinates:
            d = d * c.denominator // math.gcd(d, c.denominator)
        return d

    @property
    def integer_form(self) -> IntVector:
        """A with alpha = A / common_denominator"""
        d = self.common_denominator
        return tuple(int(c * d) for c in self.coordinates)

    def dot(self, i: Sequence[int]) -> Fraction:
        """Exact (alpha, i)"""
        if len(i) != self.n:
            raise DimensionMismatch(f"Integer vector of length {len(i)} against alpha in R^{self.n}")
        d = self.common_denominator
        return Fraction(sum(a * int(x) for a, x in zip(self.integer_form, i)), d)

    def scaled(self, factor) -> "TargetVector":
        factor = Fraction(factor)
        return TargetVector(
            tuple(c * factor for c in self.coordinates),
            self.snap_radius * abs(float(factor)),
        )

    def to_dict(self):
        return {
            "coordinates": [f"{c.numerator}/{c.denominator}" for c in self.coordinates],
            "float": [float(c) for c in self.coordinates],
            "snap_radius": self.snap_radius,
            "sources": list(self.sources),
        }


def norm_sq(i: Iterable[int]) -> int:
    return sum(int(x) * int(x) for x in i)


def is_canonical(i: Sequence[int]) -> bool:
    """True when the first nonzero coordinate is positive"""
    for x in i:
        if x:
            return x > 0
    return False


def canonical(i: Sequence[int]) -> IntVector:
    """Representative of {i, -i} with first nonzero coordinate positive"""
    vec = tuple(int(x) for x in i)
    if not any(vec):
        raise PreconditionFailed("The zero vector has no antipodal representative")
    return vec if is_canonical(vec) else tuple(-x for x in vec)
