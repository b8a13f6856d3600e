"""Shortest nonzero vector delta(Gamma) of a discrete subgroup with interval certification"""

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from mpmath import iv

from modules.exterior.subgroup import DiscreteSubgroup
from modules.lattice.reduction import NodeCounter, enumerate_ellipsoid_float, lll_transform_float
from modules.lattice.target import IntVector, canonical
from shared.errors import PreconditionFailed
from shared.interval_utils import interval_bounds, to_interval
from shared.logger import get_logger

logger = get_logger()

DEFAULT_SLACK = 1e-9
DEFAULT_DELTA_BUDGET = 10 ** 7
# Relative interval width below which a minimum is declared certified
CERTIFY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class DeltaResult:
    """delta(Gamma) with the minimizing coefficients in the given basis"""
    value: float
    witness: IntVector
    certified: bool
    interval: Tuple[float, float]
    norm: str = "euclidean"

    def to_dict(self):
        return {
            "value": self.value,
            "witness": list(self.witness),
            "certified": self.certified,
            "interval": list(self.interval),
            "norm": self.norm,
        }


def _vector_norm(v: np.ndarray, norm: str) -> float:
    if norm == "sup":
        return float(np.abs(v).max())
    return float(np.sqrt(v @ v))


def interval_vector_norm(gamma: DiscreteSubgroup, coefficients: IntVector, norm: str = "euclidean"):
    """
    Interval enclosure of ||sum_i c_i u_i|| computed from the exact basis and
    the accumulated flow times.
    """
    exact = gamma.rational_basis()
    m = gamma.dimension
    w = [sum(c * exact[i][j] for i, c in enumerate(coefficients)) for j in range(m)]
    coords = [to_interval(x) for x in w]
    if gamma.flow_times:
        total = iv.mpf(0)
        for t in gamma.flow_times:
            total = total + iv.mpf(t)
        shrink = iv.exp(-total)
        grow = iv.exp((m - 1) * total)
        coords = [x * shrink for x in coords[:-1]] + [coords[-1] * grow]
    if norm == "sup":
        bounds = [interval_bounds(abs(x)) for x in coords]
        return iv.mpf([max(b[0] for b in bounds), max(b[1] for b in bounds)])
    return iv.sqrt(sum((x ** 2 for x in coords), iv.mpf(0)))


def delta(
    gamma: DiscreteSubgroup,
    norm: str = "euclidean",
    slack: float = DEFAULT_SLACK,
    node_budget: int = DEFAULT_DELTA_BUDGET,
    certify: bool = True,
) -> DeltaResult:
    """
    Length of a shortest nonzero element of Gamma.

    LLL preconditions the basis, Fincke-Pohst enumerates every element of the
    reduced-basis ellipsoid bounded by the shortest reduced row, and the
    near-minimal candidates are re-evaluated with outward-rounded intervals.

    Args:
        norm: "euclidean" (default) or "sup" for exploration
        certify: re-evaluate near-minimal candidates in interval arithmetic;
            without it the float minimum is returned uncertified
    """
    if norm not in ("euclidean", "sup"):
        raise PreconditionFailed(f"Unknown norm '{norm}'")

    transform = lll_transform_float(gamma.basis)
    reduced = transform.astype(float) @ gamma.basis
    gram = reduced @ reduced.T
    m = gamma.dimension

    row_norms = [_vector_norm(row, norm) for row in reduced]
    best = min(row_norms)
    # The sup ball of radius best sits inside the euclidean ball of radius sqrt(m) best
    radius_sq = best ** 2 * (m if norm == "sup" else 1)
    bound = radius_sq * (1.0 + slack) + np.finfo(float).tiny

    counter = NodeCounter(node_budget)
    found: List[Tuple[float, IntVector]] = []
    for y in enumerate_ellipsoid_float(gram, bound, counter):
        length = _vector_norm(np.asarray(y, dtype=float) @ reduced, norm)
        found.append((length, y))

    shortest = min(length for length, _ in found)
    if not certify:
        length, y = min(found)
        witness = canonical(tuple(int(x) for x in np.asarray(y, dtype=np.int64) @ transform))
        return DeltaResult(shortest, witness, False, (shortest, shortest), norm)
    near = {
        canonical(tuple(int(x) for x in np.asarray(y, dtype=np.int64) @ transform))
        for length, y in found
        if length <= shortest * (1.0 + 2.0 * slack)
    }

    scored = []
    for c in sorted(near):
        lo, hi = interval_bounds(interval_vector_norm(gamma, c, norm))
        scored.append((hi, lo, c))
    scored.sort()
    hi, witness_lo, witness = scored[0]
    lo = min(s[1] for s in scored)
    certified = (hi - lo) <= CERTIFY_TOLERANCE * max(hi, np.finfo(float).tiny)
    if not certified:
        logger.warning(
            "delta could not be certified, result is heuristic",
            {"interval": (lo, hi), "candidates": len(scored)},
        )
    logger.debug("delta computed", {"nodes": counter.count, "value": shortest, "norm": norm})
    return DeltaResult(0.5 * (witness_lo + hi), witness, certified, (lo, hi), norm)
