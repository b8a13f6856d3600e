"""Discrete subgroups of R^m, their norm ||Gamma|| and the h_t(x) image norm"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Optional, Sequence, Tuple

import numpy as np

from modules.exterior.polyvector import PolyVector, wedge_all
from shared.errors import DimensionMismatch, RankDeficient

if TYPE_CHECKING:
    from modules.maps.polynomial import PolynomialMap

# Above this r*m the wedge expansion is replaced by the Gram determinant
WEDGE_EXPANSION_LIMIT = 12

ExactBasis = Tuple[Tuple[Fraction, ...], ...]


@dataclass(frozen=True, eq=False)
class DiscreteSubgroup:
    """
    Rank-r subgroup of R^m spanned by the rows of basis.

    exact_basis, when present, holds rational rows B0 such that
    basis = B0 * g_{t_1} * ... * g_{t_k} with t_j = flow_times[j]; the
    shortest-vector certification works from it.
    """
    basis: np.ndarray
    exact_basis: Optional[ExactBasis] = None
    flow_times: Tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        basis = np.array(self.basis, dtype=float, ndmin=2)
        if basis.ndim != 2 or basis.shape[0] == 0:
            raise RankDeficient("Subgroup basis must be a non-empty matrix")
        r, m = basis.shape
        if r > m:
            raise RankDeficient(f"Rank {r} exceeds ambient dimension {m}", {"rank": r, "dimension": m})
        if not np.all(np.isfinite(basis)):
            raise RankDeficient("Subgroup basis has non-finite entries")
        # Column scaling preserves rank and undoes diagonal flows
        column_scale = np.abs(basis).max(axis=0)
        column_scale[column_scale == 0] = 1.0
        if np.linalg.matrix_rank(basis / column_scale) < r:
            raise RankDeficient("Basis rows are linearly dependent", {"rank": r, "dimension": m})
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        if self.exact_basis is not None:
            exact = tuple(tuple(Fraction(x) for x in row) for row in self.exact_basis)
            if len(exact) != r or any(len(row) != m for row in exact):
                raise DimensionMismatch("exact_basis shape differs from basis")
            object.__setattr__(self, "exact_basis", exact)
        object.__setattr__(self, "flow_times", tuple(float(t) for t in self.flow_times))

    @classmethod
    def from_rational_rows(cls, rows: Sequence[Sequence[Fraction]]) -> "DiscreteSubgroup":
        exact = tuple(tuple(Fraction(x) for x in row) for row in rows)
        return cls(np.array([[float(x) for x in row] for row in exact]), exact_basis=exact)

    @property
    def rank(self) -> int:
        return self.basis.shape[0]

    @property
    def dimension(self) -> int:
        return self.basis.shape[1]

    def gram(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def rational_basis(self) -> ExactBasis:
        """exact_basis, or the float rows read as exact dyadic rationals"""
        if self.exact_basis is not None:
            return self.exact_basis
        return tuple(tuple(Fraction(float(x)) for x in row) for row in self.basis)

    def transformed(self, unimodular: np.ndarray) -> "DiscreteSubgroup":
        """Same subgroup, basis rows replaced by unimodular @ basis"""
        u = np.asarray(unimodular)
        exact = None
        if self.exact_basis is not None:
            exact = tuple(
                tuple(sum(int(u[i, k]) * self.exact_basis[k][j] for k in range(self.rank))
                      for j in range(self.dimension))
                for i in range(self.rank)
            )
        return DiscreteSubgroup(u.astype(float) @ self.basis, exact, self.flow_times)


def basis_polyvector(gamma: DiscreteSubgroup) -> PolyVector:
    """u_1 ^ ... ^ u_r for the basis rows of gamma"""
    return wedge_all((PolyVector.from_vector(row) for row in gamma.basis), gamma.dimension)


def wedge_norm(gamma: DiscreteSubgroup) -> float:
    """||u_1 ^ ... ^ u_r|| by full wedge expansion"""
    return basis_polyvector(gamma).norm()


def gram_norm(gamma: DiscreteSubgroup) -> float:
    """sqrt(det Gram(u_1..u_r))"""
    return math.sqrt(max(float(np.linalg.det(gamma.gram())), 0.0))


def subgroup_norm(gamma: DiscreteSubgroup) -> float:
    """
    ||Gamma||, independent of the chosen basis.

    Examples:
        >>> subgroup_norm(DiscreteSubgroup(np.array([[3.0, 4.0]])))
        5.0
    """
    if gamma.rank * gamma.dimension <= WEDGE_EXPANSION_LIMIT:
        return wedge_norm(gamma)
    return gram_norm(gamma)


def projection_norm(gamma: DiscreteSubgroup, v: Sequence[float]) -> float:
    """Norm of the orthogonal projection of v onto span(Gamma)"""
    v = np.asarray(v, dtype=float)
    if v.shape != (gamma.dimension,):
        raise DimensionMismatch(f"Vector of length {v.size} projected into R^{gamma.dimension}")
    coefs, *_ = np.linalg.lstsq(gamma.basis.T, v, rcond=None)
    return float(np.linalg.norm(gamma.basis.T @ coefs))


def _map_value(f: "PolynomialMap", x, gamma: DiscreteSubgroup) -> np.ndarray:
    value = np.asarray(f.evaluate_float(x), dtype=float)
    if value.shape != (gamma.dimension,):
        raise DimensionMismatch(
            f"f(x) has {value.size} coordinates but Gamma lives in R^{gamma.dimension}",
            {"codomain": int(value.size), "dimension": gamma.dimension},
        )
    return value


def ht_image_basis(f: "PolynomialMap", x, t: float, gamma: DiscreteSubgroup) -> DiscreteSubgroup:
    """
    Basis of h_t(x)Gamma in R^{n+1}: rows (e^{-t} u_i, e^{nt} (u_i, f(x))).
    """
    value = _map_value(f, x, gamma)
    n = gamma.dimension
    last = math.exp(n * t) * (gamma.basis @ value)
    rows = np.hstack([math.exp(-t) * gamma.basis, last[:, None]])
    return DiscreteSubgroup(rows)


def ht_subgroup_norm(f: "PolynomialMap", x, t: float, gamma: DiscreteSubgroup) -> float:
    """
    ||h_t(x)Gamma|| = sqrt(e^{-2rt} + e^{2(n-r+1)t} ||pi_Gamma f(x)||^2) ||Gamma||
    """
    value = _map_value(f, x, gamma)
    r = gamma.rank
    n = gamma.dimension
    projected = projection_norm(gamma, value)
    scale = math.exp(-2 * r * t) + math.exp(2 * (n - r + 1) * t) * projected ** 2
    return math.sqrt(scale) * subgroup_norm(gamma)
