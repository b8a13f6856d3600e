"""
Certified derivative bounds on hypercubes, the sublevel-set constant and
Lipschitz constants

Upper bounds come from batch interval enclosures over a uniform grid of
cells. Lower bounds on |d^l_{x_i} f| come from bisection: cells whose
enclosure avoids zero are certified, the rest are split until they are
narrower than the tolerance.
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np

from modules.maps.curvature import multi_indices
from modules.maps.polynomial import PolynomialMap, ScalarPolynomial
from shared.errors import NotCertifiable, PreconditionFailed
from shared.geometry import Hypercube
from shared.logger import get_logger

logger = get_logger()

DEFAULT_GRID_CELLS = 4096
DEFAULT_TOLERANCE = 1e-6
MAX_BISECTION_BOXES = 1 << 20

HYPOTHESIS_FAILS = "hypothesis fails"
TOLERANCE_TOO_COARSE = "tolerance too coarse"

MapLike = Union[PolynomialMap, ScalarPolynomial]


@dataclass(frozen=True)
class DerivativeBounds:
    """m <= |d^l_{x_i} f| for every axis i and |d^beta f| <= M for |beta| <= l on region"""
    m: float
    M: float
    region: Hypercube
    l: int
    axis_lower: Tuple[float, ...] = ()

    def to_dict(self):
        return {
            "m": self.m,
            "M": self.M,
            "l": self.l,
            "region": [list(self.region.lo), list(self.region.hi)],
            "axis_lower": list(self.axis_lower),
        }


def _components(f: MapLike) -> List[ScalarPolynomial]:
    return list(f.components) if isinstance(f, PolynomialMap) else [f]


def grid_cells(region: Hypercube, cells: int = DEFAULT_GRID_CELLS) -> Tuple[np.ndarray, np.ndarray]:
    """Uniform subdivision of the region into about `cells` boxes, as corner arrays"""
    d = region.dimension
    per_axis = max(1, int(round(cells ** (1.0 / d))))
    edges = [np.linspace(a, b, per_axis + 1) for a, b in zip(region.lo, region.hi)]
    lows = np.meshgrid(*[e[:-1] for e in edges], indexing="ij")
    highs = np.meshgrid(*[e[1:] for e in edges], indexing="ij")
    lo = np.stack([g.reshape(-1) for g in lows], axis=1)
    hi = np.stack([g.reshape(-1) for g in highs], axis=1)
    return lo, hi


def enclosure_abs_max(g: ScalarPolynomial, lo: np.ndarray, hi: np.ndarray) -> float:
    """Certified sup |g| over the union of the boxes"""
    if g.is_zero:
        return 0.0
    low, high = g.enclose(lo, hi)
    return float(max(np.abs(low).max(), np.abs(high).max()))


def sup_bound(f: MapLike, region: Hypercube, cells: int = DEFAULT_GRID_CELLS) -> float:
    """Certified sup of the euclidean norm of f over region"""
    lo, hi = grid_cells(region, cells)
    per_component = [enclosure_abs_max(c, lo, hi) for c in _components(f)]
    return float(np.linalg.norm(per_component)) * (1.0 + 1e-12)


def axis_lower_bound(
    g: ScalarPolynomial,
    region: Hypercube,
    tolerance: float = DEFAULT_TOLERANCE,
) -> Tuple[Optional[float], str]:
    """
    Certified inf |g| over region by bisection.

    Returns (bound, "") on success, or (None, reason) where the reason
    separates a derivative that vanishes (sign change or exact zero seen)
    from cells that stayed ambiguous at the tolerance.
    """
    if g.is_zero:
        return None, HYPOTHESIS_FAILS
    lo = np.array([region.lo], dtype=float)
    hi = np.array([region.hi], dtype=float)
    best = math.inf
    signs = set()
    while lo.shape[0]:
        low, high = g.enclose(lo, hi)
        certified = (low > 0) | (high < 0)
        if certified.any():
            signs.update(np.unique(np.sign(low[certified])).tolist())
            if len(signs) > 1:
                return None, HYPOTHESIS_FAILS
            best = min(best, float(np.minimum(np.abs(low[certified]), np.abs(high[certified])).min()))
        lo, hi = lo[~certified], hi[~certified]
        if lo.shape[0] == 0:
            break

        # Any sampled zero or sign change settles the question
        samples = np.concatenate([lo, hi, (lo + hi) / 2])
        values = g.evaluate_points(samples)
        if (values == 0).any() or (values.min() < 0 < values.max()):
            return None, HYPOTHESIS_FAILS

        widths = hi - lo
        if widths.max(axis=1).min() < tolerance or lo.shape[0] * 2 > MAX_BISECTION_BOXES:
            return None, TOLERANCE_TOO_COARSE
        axis = np.argmax(widths, axis=1)
        rows = np.arange(lo.shape[0])
        mid = (lo[rows, axis] + hi[rows, axis]) / 2
        left_hi = hi.copy()
        left_hi[rows, axis] = mid
        right_lo = lo.copy()
        right_lo[rows, axis] = mid
        lo = np.concatenate([lo, right_lo])
        hi = np.concatenate([left_hi, hi])
    return best, ""


def derivative_bounds(
    f: MapLike,
    region: Hypercube,
    l: int,
    tolerance: float = DEFAULT_TOLERANCE,
    cells: int = DEFAULT_GRID_CELLS,
) -> DerivativeBounds:
    """
    m and M of the sublevel lemma on region.

    M bounds the euclidean norm of every d^beta f, |beta| <= l (beta = 0
    included). m is the smallest per-axis lower bound on |d^l_{x_i} f|; for
    vector maps the best component lower bound is used on each axis.

    Raises:
        NotCertifiable: with details["reason"] "hypothesis fails" or
            "tolerance too coarse"
    """
    if l < 1:
        raise PreconditionFailed(f"Order l must be >= 1, got {l}")
    components = _components(f)
    d = components[0].d
    if region.dimension != d:
        raise PreconditionFailed(f"Region of dimension {region.dimension} for a map of {d} variables")

    lo, hi = grid_cells(region, cells)
    M = 0.0
    for beta in multi_indices(d, 0, l):
        norms = [enclosure_abs_max(c.derivative(beta), lo, hi) for c in components]
        M = max(M, float(np.linalg.norm(norms)))
    M *= 1.0 + 1e-12

    axis_lower = []
    for axis in range(d):
        j = tuple(l if a == axis else 0 for a in range(d))
        found, reasons = [], []
        for c in components:
            bound, reason = axis_lower_bound(c.derivative(j), region, tolerance)
            if bound is None:
                reasons.append(reason)
            else:
                found.append(bound)
        if not found:
            reason = TOLERANCE_TOO_COARSE if TOLERANCE_TOO_COARSE in reasons else HYPOTHESIS_FAILS
            raise NotCertifiable(
                f"No positive lower bound on the order-{l} derivative along x{axis + 1}: {reason}",
                {"axis": axis + 1, "l": l, "reason": reason},
            )
        axis_lower.append(max(found))

    m = min(axis_lower)
    logger.debug("Derivative bounds certified", {"l": l, "m": m, "M": M})
    return DerivativeBounds(m, max(M, m), region, l, tuple(axis_lower))


def km_constant(d: int, l: int, m: float, M: float) -> float:
    """
    C = d l (l+1) ((M/m)(l+1)(2 l^l + 1))^(1/l)

    Examples:
        >>> km_constant(1, 1, 1.0, 1.0)
        12.0
    """
    if m <= 0:
        raise PreconditionFailed(f"m must be positive, got {m}")
    if d < 1 or l < 1:
        raise PreconditionFailed(f"d and l must be >= 1, got {(d, l)}")
    return d * l * (l + 1) * ((M / m) * (l + 1) * (2 * l ** l + 1)) ** (1.0 / l)


def lipschitz_bound(f: PolynomialMap, r: float, cells: int = DEFAULT_GRID_CELLS) -> float:
    """
    kappa with |f(x) - f(0)| <= kappa |x| for |x| <= r.

    The entrywise enclosure U >= |Df| over the cube [-r, r]^d bounds the
    operator norm, since ||Df|| <= || |Df| || <= ||U||.
    """
    if r <= 0:
        raise PreconditionFailed(f"Radius must be positive, got {r}")
    region = Hypercube.symmetric(f.d, r)
    lo, hi = grid_cells(region, cells)
    upper = np.array([[enclosure_abs_max(entry, lo, hi) for entry in row] for row in f.jacobian()])
    if not upper.any():
        return 0.0
    return float(np.linalg.norm(upper, 2)) * (1.0 + 1e-12)
