"""
Lattice reduction and ellipsoid enumeration

LLL runs on integer bases through sympy's DomainMatrix; the enumeration is
the Fincke-Pohst recursion over the quadratic form y^T G y, in exact rational
arithmetic (for sigma) or in floating point (for delta).
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Sequence, Tuple

import numpy as np
from sympy import QQ, ZZ
from sympy.polys.matrices import DM
from sympy.polys.matrices.exceptions import DMRankError

from shared.errors import BudgetExceeded
from shared.logger import get_logger

logger = get_logger()

LLL_DELTA = QQ(99, 100)


@dataclass
class NodeCounter:
    """Enumeration node budget shared across restarts"""
    budget: int
    count: int = 0

    def tick(self, what: str = "enumeration"):
        self.count += 1
        if self.count > self.budget:
            raise BudgetExceeded(
                f"{what} exceeded node budget {self.budget}",
                {"budget": self.budget, "nodes": self.count},
            )


def lll_reduce(rows: Sequence[Sequence[int]]) -> Tuple[List[List[int]], List[List[int]]]:
    """
    LLL-reduce integer row vectors.

    Returns:
        (reduced rows, unimodular transform T) with T * rows == reduced
    """
    basis = DM([[ZZ(int(x)) for x in row] for row in rows], ZZ)
    reduced, transform = basis.lll_transform(delta=LLL_DELTA)
    return (
        [[int(x) for x in row] for row in reduced.to_list()],
        [[int(x) for x in row] for row in transform.to_list()],
    )


def lll_transform_float(basis: np.ndarray, bits: int = 50) -> np.ndarray:
    """
    Unimodular T making T @ basis LLL-reduced (for a real basis).

    The basis is scaled by a power of two and rounded to integers; T stays
    exact, only the reduction quality depends on the rounding. Identity is
    returned when rounding destroys independence.
    """
    r = basis.shape[0]
    peak = float(np.abs(basis).max())
    if peak == 0.0:
        return np.eye(r, dtype=np.int64)
    scale = math.ldexp(1.0, bits - math.frexp(peak)[1])
    rows = [[int(round(x * scale)) for x in row] for row in basis]
    try:
        _, transform = lll_reduce(rows)
    except DMRankError:
        logger.debug("LLL skipped: rounded basis is rank deficient", {"rank": r})
        return np.eye(r, dtype=np.int64)
    return np.array(transform, dtype=object).astype(np.int64)


def quadratic_form_decomposition(gram: Sequence[Sequence[Fraction]]) -> Tuple[List[Fraction], List[List[Fraction]]]:
    """
    Exact decomposition y^T G y = sum_i d_i (y_i + sum_{j>i} u_ij y_j)^2.

    Returns:
        (d, u) with u upper triangular (diagonal unused)
    """
    n = len(gram)
    q = [[Fraction(x) for x in row] for row in gram]
    for i in range(n):
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    d = [q[i][i] for i in range(n)]
    u = [[q[i][j] if j > i else Fraction(0) for j in range(n)] for i in range(n)]
    return d, u


def _integer_window(center: Fraction, radius_sq: Fraction) -> range:
    """All integers y with (y - center)^2 <= radius_sq"""
    if radius_sq < 0:
        return range(0)
    spread = math.sqrt(float(radius_sq))
    lo = math.floor(float(center) - spread) - 1
    hi = math.ceil(float(center) + spread) + 1
    while lo <= hi and (lo - center) ** 2 > radius_sq:
        lo += 1
    while hi >= lo and (hi - center) ** 2 > radius_sq:
        hi -= 1
    return range(lo, hi + 1)


def enumerate_ellipsoid_exact(
    gram: Sequence[Sequence[Fraction]],
    bound: Fraction,
    counter: NodeCounter,
) -> Iterator[Tuple[int, ...]]:
    """
    Every nonzero integer y with y^T G y <= bound (both y and -y), exactly.
    """
    d, u = quadratic_form_decomposition(gram)
    n = len(d)
    y = [0] * n

    def recurse(level: int, remaining: Fraction):
        center = -sum((u[level][j] * y[j] for j in range(level + 1, n)), Fraction(0))
        for value in _integer_window(center, remaining / d[level]):
            counter.tick("Branch-and-bound enumeration")
            y[level] = value
            rest = remaining - d[level] * (value - center) ** 2
            if level == 0:
                if any(y):
                    yield tuple(y)
            else:
                yield from recurse(level - 1, rest)
        y[level] = 0

    yield from recurse(n - 1, Fraction(bound))


def enumerate_ellipsoid_float(
    gram: np.ndarray,
    bound: float,
    counter: NodeCounter,
) -> Iterator[Tuple[int, ...]]:
    """Floating-point Fincke-Pohst enumeration of y^T G y <= bound, y != 0"""
    chol = np.linalg.cholesky(gram).T  # upper: G = R^T R
    n = chol.shape[0]
    diag = np.diag(chol) ** 2
    ratios = chol / np.diag(chol)[:, None]
    y = [0] * n

    def recurse(level: int, remaining: float):
        center = -sum(ratios[level, j] * y[j] for j in range(level + 1, n))
        spread = math.sqrt(max(remaining, 0.0) / diag[level])
        for value in range(math.ceil(center - spread), math.floor(center + spread) + 1):
            counter.tick("Shortest-vector enumeration")
            y[level] = value
            rest = remaining - diag[level] * (value - center) ** 2
            if level == 0:
                if any(y):
                    yield tuple(y)
            else:
                yield from recurse(level - 1, rest)
        y[level] = 0

    yield from recurse(n - 1, float(bound))
