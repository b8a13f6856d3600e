"""
Non-degeneracy (l-curvedness) of polynomial maps at a point

V is the span of the partial derivatives d^j f(x), 1 <= |j| <= l. The map is
l-curved at x when its whole image lies in the affine subspace f(x) + V,
which for polynomials is a statement about coefficient vectors.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Any, Dict, List, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.matrices import DM

from modules.maps.polynomial import MultiIndex, PolynomialMap
from shared.logger import get_logger
from shared.rational_utils import format_rational

logger = get_logger()

RationalVector = Tuple[Fraction, ...]


@dataclass(frozen=True)
class CurvatureReport:
    """
    is_curved with the exact basis of V. rank_with_value is the rank once
    f(x) itself joins the spanning set.
    """
    is_curved: bool
    basis: Tuple[RationalVector, ...]
    rank: int
    rank_with_value: int
    l: int
    point: Tuple[Fraction, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "is_curved": self.is_curved,
            "rank": self.rank,
            "rank_with_value": self.rank_with_value,
            "l": self.l,
            "point": [format_rational(Fraction(x)) for x in self.point],
            "basis": [[format_rational(v) for v in row] for row in self.basis],
        }


def multi_indices(d: int, low: int, high: int) -> List[MultiIndex]:
    """All j in N^d with low <= |j| <= high, graded then lexicographic"""
    out = [j for j in product(range(high + 1), repeat=d) if low <= sum(j) <= high]
    return sorted(out, key=lambda j: (sum(j), tuple(-e for e in j)))


def _to_qq(rows: Sequence[Sequence[Fraction]]):
    return DM([[(v.numerator, v.denominator) for v in row] for row in rows], QQ)


def row_space(rows: Sequence[Sequence[Fraction]]) -> List[RationalVector]:
    """Reduced row echelon basis of the span of rows"""
    rows = [tuple(Fraction(v) for v in row) for row in rows]
    if not rows or not any(any(row) for row in rows):
        return []
    reduced, pivots = _to_qq(rows).rref()
    basis = []
    for row in reduced.to_list()[: len(pivots)]:
        basis.append(tuple(Fraction(int(e.numerator), int(e.denominator)) for e in row))
    return basis


def rank_of(rows: Sequence[Sequence[Fraction]]) -> int:
    return len(row_space(rows))


def derivative_vectors(f: PolynomialMap, x: Sequence, l: int) -> List[RationalVector]:
    """d^j f(x) for 1 <= |j| <= l, exactly"""
    x = tuple(Fraction(v) for v in x)
    return [tuple(Fraction(v) for v in f.derivative(j).evaluate(x)) for j in multi_indices(f.d, 1, l)]


def curvature_check(f: PolynomialMap, x: Optional[Sequence] = None, l: Optional[int] = None) -> CurvatureReport:
    """
    Exact l-curvature test at a rational point (default the origin).

    Examples:
        >>> from modules.maps.polynomial import moment_curve
        >>> curvature_check(moment_curve(2), l=2).rank
        2
        >>> curvature_check(moment_curve(2), l=1).is_curved
        False
    """
    l = f.l if l is None else l
    x = tuple(Fraction(v) for v in (x if x is not None else [0] * f.d))
    spanning = derivative_vectors(f, x, l)
    basis = row_space(spanning)
    rank = len(basis)

    value = tuple(Fraction(v) for v in f.evaluate(x))
    rank_with_value = rank_of(spanning + [value])

    # Coefficient vectors of f - f(x), one per monomial
    coefficient_rows: Dict[Tuple[int, ...], List[Fraction]] = {}
    for c, component in enumerate(f.components):
        for monomial, coef in component.terms:
            coefficient_rows.setdefault(monomial, [Fraction(0)] * f.n)[c] += coef
    constant = (0,) * f.d
    shifted = coefficient_rows.setdefault(constant, [Fraction(0)] * f.n)
    coefficient_rows[constant] = [a - b for a, b in zip(shifted, value)]
    image_rows = [row for row in coefficient_rows.values() if any(row)]

    is_curved = rank_of(list(basis) + image_rows) == rank
    logger.debug("Curvature check", {"l": l, "rank": rank, "curved": is_curved})
    return CurvatureReport(is_curved, tuple(basis), rank, rank_with_value, l, x)
