"""Exterior algebra over R^m: p-vectors, wedge product, Hodge star and scalar product"""

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterable, Sequence, Tuple

import numpy as np

from shared.errors import DegreeOverflow, DimensionMismatch

BasisTuple = Tuple[int, ...]


def shuffle_sign(first: Sequence[int], second: Sequence[int]) -> int:
    """
    Sign of the permutation sorting first + second, both increasing.

    Counts the pairs (s, t) with s in first, t in second and s > t.
    """
    inversions = sum(1 for s in first for t in second if s > t)
    return -1 if inversions % 2 else 1


@dataclass(frozen=True)
class PolyVector:
    """
    A p-vector of R^m stored as {increasing 1-based index tuple: coefficient}.

    Zero coefficients are dropped on construction so equal p-vectors compare
    equal.
    """
    degree: int
    dimension: int
    coefficients: Dict[BasisTuple, float] = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.degree <= self.dimension:
            raise DegreeOverflow(
                f"Degree {self.degree} outside 0..{self.dimension}",
                {"degree": self.degree, "dimension": self.dimension},
            )
        cleaned = {}
        for key, value in self.coefficients.items():
            key = tuple(int(i) for i in key)
            if len(key) != self.degree:
                raise DimensionMismatch(f"Index tuple {key} does not have length {self.degree}")
            if any(a >= b for a, b in zip(key, key[1:])):
                raise DimensionMismatch(f"Index tuple {key} is not strictly increasing")
            if key and (key[0] < 1 or key[-1] > self.dimension):
                raise DimensionMismatch(f"Index tuple {key} outside 1..{self.dimension}")
            if value != 0:
                cleaned[key] = float(value)
        object.__setattr__(self, "coefficients", dict(sorted(cleaned.items())))

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------
    @classmethod
    def basis(cls, indices: Iterable[int], dimension: int) -> "PolyVector":
        """The basis element e_{i1} ^ ... ^ e_{ip} (indices must be increasing)"""
        key = tuple(indices)
        return cls(len(key), dimension, {key: 1.0})

    @classmethod
    def scalar(cls, value: float, dimension: int) -> "PolyVector":
        return cls(0, dimension, {(): value})

    @classmethod
    def from_vector(cls, vector: Sequence[float]) -> "PolyVector":
        """The 1-vector with the given coordinates"""
        values = [float(x) for x in vector]
        return cls(1, len(values), {(j + 1,): x for j, x in enumerate(values)})

    # ------------------------------------------------------------------
    # Linear structure
    # ------------------------------------------------------------------
    def _check_compatible(self, other: "PolyVector"):
        if self.dimension != other.dimension:
            raise DimensionMismatch(
                f"Ambient dimensions differ: {self.dimension} vs {other.dimension}"
            )
        if self.degree != other.degree:
            raise DimensionMismatch(f"Degrees differ: {self.degree} vs {other.degree}")

    def __add__(self, other: "PolyVector") -> "PolyVector":
        self._check_compatible(other)
        result = dict(self.coefficients)
        for key, value in other.coefficients.items():
            result[key] = result.get(key, 0.0) + value
        return PolyVector(self.degree, self.dimension, result)

    def __neg__(self) -> "PolyVector":
        return self * -1.0

    def __sub__(self, other: "PolyVector") -> "PolyVector":
        return self + (-other)

    def __mul__(self, scalar: float) -> "PolyVector":
        return PolyVector(
            self.degree,
            self.dimension,
            {key: value * float(scalar) for key, value in self.coefficients.items()},
        )

    __rmul__ = __mul__

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    def coefficient(self, key: BasisTuple) -> float:
        return self.coefficients.get(tuple(key), 0.0)

    def as_array(self) -> np.ndarray:
        """Coefficients in lexicographic order of all increasing tuples"""
        keys = combinations(range(1, self.dimension + 1), self.degree)
        return np.array([self.coefficient(k) for k in keys], dtype=float)

    def norm(self) -> float:
        return math.sqrt(inner(self, self))


def wedge(u: PolyVector, v: PolyVector) -> PolyVector:
    """
    Exterior product u ^ v.

    Examples:
        >>> e1, e2 = PolyVector.basis([1], 2), PolyVector.basis([2], 2)
        >>> wedge(e1, e2).coefficients
        {(1, 2): 1.0}
    """
    if u.dimension != v.dimension:
        raise DimensionMismatch(
            f"Ambient dimensions differ: {u.dimension} vs {v.dimension}",
            {"left": u.dimension, "right": v.dimension},
        )
    degree = u.degree + v.degree
    if degree > u.dimension:
        raise DegreeOverflow(
            f"deg {u.degree} + deg {v.degree} exceeds ambient dimension {u.dimension}",
            {"left": u.degree, "right": v.degree, "dimension": u.dimension},
        )

    result: Dict[BasisTuple, float] = {}
    for s, a in u.coefficients.items():
        s_set = set(s)
        for t, b in v.coefficients.items():
            if s_set.intersection(t):
                continue
            key = tuple(sorted(s + t))
            result[key] = result.get(key, 0.0) + shuffle_sign(s, t) * a * b
    return PolyVector(degree, u.dimension, result)


def wedge_all(vectors: Iterable[PolyVector], dimension: int) -> PolyVector:
    """u_1 ^ u_2 ^ ... ^ u_r (the scalar 1 for an empty list)"""
    result = PolyVector.scalar(1.0, dimension)
    for v in vectors:
        result = wedge(result, v)
    return result


def complement(key: BasisTuple, dimension: int) -> BasisTuple:
    present = set(key)
    return tuple(i for i in range(1, dimension + 1) if i not in present)


def hodge_star(u: PolyVector) -> PolyVector:
    """
    Hodge star: *e_S = sign(S^c, S) e_{S^c}, so that (*e_S) ^ e_S = e_1 ^ ... ^ e_m.

    Examples:
        >>> hodge_star(PolyVector.basis([1], 2)).coefficients
        {(2,): -1.0}
    """
    m = u.dimension
    result: Dict[BasisTuple, float] = {}
    for key, value in u.coefficients.items():
        comp = complement(key, m)
        result[comp] = result.get(comp, 0.0) + shuffle_sign(comp, key) * value
    return PolyVector(m - u.degree, m, result)


def inner(u: PolyVector, v: PolyVector) -> float:
    """Scalar product for which the basis tuples e_S are orthonormal"""
    if u.dimension != v.dimension or u.degree != v.degree:
        raise DimensionMismatch(
            "inner() needs equal degree and dimension",
            {"left": (u.degree, u.dimension), "right": (v.degree, v.dimension)},
        )
    small, large = sorted((u.coefficients, v.coefficients), key=len)
    return float(sum(value * large.get(key, 0.0) for key, value in small.items()))


def canonical_class(u: PolyVector) -> PolyVector:
    """Representative of {u, -u} whose first nonzero coefficient is positive"""
    for value in u.coefficients.values():
        return u if value > 0 else -u
    return u
