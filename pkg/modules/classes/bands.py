"""
Bands M_i = {beta : |(beta, i)| < rho_k a_k}, k = exp_index(i), and the
counting combinatorics of the dyadic shells exp_index(i) = k.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from modules.classes.membership import exp_index
from modules.classes.sequences import DecreasingSequence, RhoSequence
from modules.lattice.enumeration import _canonical_mask, ball_points_array, count_ball
from modules.lattice.target import IntVector, TargetVector, norm_sq
from shared.errors import BudgetExceeded, PreconditionFailed
from shared.logger import get_logger

logger = get_logger()

DEFAULT_BAND_BUDGET = 5 * 10 ** 7
DEFAULT_PAIR_BUDGET = 2 * 10 ** 7
EXACT_BITS = 96

Center = Union[TargetVector, Sequence]


@dataclass(frozen=True)
class Band:
    """
    The open slab |(beta, i)| < halfwidth around the hyperplane (beta, i) = 0.

    halfwidth bounds the scalar product; the euclidean half-width of the slab
    is halfwidth / ||i||.
    """
    i: IntVector
    k: int
    halfwidth: Fraction

    def __post_init__(self):
        if self.halfwidth < 0:
            raise PreconditionFailed(f"Band halfwidth must be nonnegative, got {self.halfwidth}")

    @property
    def distance_halfwidth(self) -> float:
        return float(self.halfwidth) / math.sqrt(norm_sq(self.i))

    def contains(self, beta: Sequence) -> bool:
        value = sum(Fraction(b) * c for b, c in zip(beta, self.i))
        return abs(value) < self.halfwidth

    def distance_to(self, center: Sequence) -> float:
        """Euclidean distance from center to the slab (0 inside)"""
        value = abs(float(np.dot(np.asarray(center, dtype=float), self.i)))
        return max(0.0, (value - float(self.halfwidth)) / math.sqrt(norm_sq(self.i)))


def band_halfwidth(a: DecreasingSequence, rho: DecreasingSequence, k: int) -> Fraction:
    """rho_k a_k rounded up to a rational when it is not one"""
    return (rho.term(k) * a.term(k)).upper_fraction(EXACT_BITS)


def make_band(i: Sequence[int], a: DecreasingSequence, rho: DecreasingSequence) -> Band:
    i = tuple(int(c) for c in i)
    k = exp_index(i)
    return Band(i, k, band_halfwidth(a, rho, k))


@dataclass
class BandSet:
    """Canonical band normals as an int64 array, with one halfwidth per shell"""
    n: int
    vectors: np.ndarray
    ks: np.ndarray
    halfwidths: Dict[int, Fraction] = field(default_factory=dict)

    @classmethod
    def empty(cls, n: int) -> "BandSet":
        return cls(n, np.zeros((0, n), dtype=np.int64), np.zeros(0, dtype=np.int64), {})

    def __len__(self) -> int:
        return int(self.vectors.shape[0])

    @property
    def halfwidth_array(self) -> np.ndarray:
        table = {k: float(w) for k, w in self.halfwidths.items()}
        return np.array([table[int(k)] for k in self.ks], dtype=float)

    @property
    def norms(self) -> np.ndarray:
        return np.sqrt(np.einsum("ij,ij->i", self.vectors, self.vectors).astype(float))

    def counts_per_shell(self) -> Dict[int, int]:
        ks, counts = np.unique(self.ks, return_counts=True)
        return {int(k): int(c) for k, c in zip(ks, counts)}

    def to_bands(self) -> List[Band]:
        return [
            Band(tuple(int(c) for c in row), int(k), self.halfwidths[int(k)])
            for row, k in zip(self.vectors, self.ks)
        ]

    def restrict(self, K: int) -> "BandSet":
        keep = self.ks <= K
        return BandSet(self.n, self.vectors[keep], self.ks[keep],
                       {k: w for k, w in self.halfwidths.items() if k <= K})

    # ------------------------------------------------------------------
    # Membership of points in the union of bands
    # ------------------------------------------------------------------
    def hit_mask(self, points: np.ndarray, pair_budget: int = DEFAULT_PAIR_BUDGET) -> np.ndarray:
        """
        For float points of shape (N, n), whether each lies in some band.

        In the plane the bands of one shell are sorted by slope and only the
        pairs inside the slope window of each point are tested; other
        dimensions test every pair in chunks.
        """
        points = np.asarray(points, dtype=float)
        if len(self) == 0 or points.shape[0] == 0:
            return np.zeros(points.shape[0], dtype=bool)
        if self.n == 2:
            return self._hit_mask_planar(points, pair_budget)
        return self._hit_mask_pairs(points, self.vectors, self.halfwidth_array, pair_budget)

    @staticmethod
    def _hit_mask_pairs(points: np.ndarray, vectors: np.ndarray, widths: np.ndarray, pair_budget: int) -> np.ndarray:
        mask = np.zeros(points.shape[0], dtype=bool)
        if vectors.shape[0] == 0:
            return mask
        normals = vectors.astype(float)
        chunk = max(1, pair_budget // max(1, vectors.shape[0]))
        for start in range(0, points.shape[0], chunk):
            block = points[start:start + chunk]
            mask[start:start + chunk] = (np.abs(block @ normals.T) < widths[None, :]).any(axis=1)
        return mask

    def _hit_mask_planar(self, points: np.ndarray, pair_budget: int) -> np.ndarray:
        # Pivot on the coordinate of larger typical magnitude
        q = int(np.argmax(np.abs(points).mean(axis=0)))
        p = 1 - q
        mask = np.zeros(points.shape[0], dtype=bool)
        widths = self.halfwidth_array
        ip = self.vectors[:, p]
        iq = self.vectors[:, q]
        yp = points[:, p]
        yq = points[:, q]

        axis_bands = ip == 0
        if axis_bands.any():
            threshold = np.max(widths[axis_bands] / np.abs(iq[axis_bands]).astype(float))
            mask |= np.abs(yq) < threshold

        degenerate = yq == 0
        if degenerate.any():
            mask[degenerate] |= self._hit_mask_pairs(
                points[degenerate], self.vectors, widths, pair_budget
            )

        live = np.flatnonzero(~degenerate & ~mask)
        if live.size == 0:
            return mask
        ratio = yp[live] / yq[live]
        scale = np.abs(yq[live])

        for k in np.unique(self.ks[~axis_bands]):
            select = np.flatnonzero((self.ks == k) & ~axis_bands)
            keys = -iq[select].astype(float) / ip[select].astype(float)
            order = np.argsort(keys, kind="stable")
            sorted_keys = keys[order]
            width = float(self.halfwidths[int(k)])
            # |(y, i)| < w  implies  |y_p/y_q + i_q/i_p| < w/(|y_q||i_p|) <= w/|y_q|
            window = width / scale * (1.0 + 1e-9) + 1e-15 * np.abs(ratio)
            lo = np.searchsorted(sorted_keys, ratio - window, side="left")
            hi = np.searchsorted(sorted_keys, ratio + window, side="right")
            counts = hi - lo
            total = int(counts.sum())
            if total == 0:
                continue
            if total > pair_budget:
                logger.debug("Band window too wide, testing all pairs", {"k": int(k), "pairs": total})
                sub = self._hit_mask_pairs(
                    points[live], self.vectors[select], widths[select], pair_budget
                )
                mask[live[sub]] = True
                continue
            point_idx = np.repeat(np.arange(live.size), counts)
            offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
            band_idx = select[order[np.repeat(lo, counts) + offsets]]
            rows = points[live[point_idx]]
            normals = self.vectors[band_idx].astype(float)
            hits = np.abs(rows[:, 0] * normals[:, 0] + rows[:, 1] * normals[:, 1]) < width
            mask[live[point_idx[hits]]] = True
        return mask


# ----------------------------------------------------------------------
# Candidate bands
# ----------------------------------------------------------------------

def _as_rho(rho: Union[RhoSequence, DecreasingSequence]) -> DecreasingSequence:
    return rho.rho if isinstance(rho, RhoSequence) else rho


def admissible_shells(a: DecreasingSequence, r, K: int) -> List[int]:
    """k in 1..K with a_k / 2^(k+1) < r"""
    r = Fraction(r)
    if r <= 0:
        raise PreconditionFailed(f"Radius must be positive, got {r}")
    a.check_domain(K)
    return [k for k in range(1, K + 1) if a.term(k) / 2 ** (k + 1) < r]


def _center_fractions(center: Center) -> List[Fraction]:
    if isinstance(center, TargetVector):
        return list(center.coordinates)
    return [Fraction(c) for c in center]


def _shell_points(n: int, k: int, budget: int) -> np.ndarray:
    R = 2 ** k
    if (2 * R + 1) ** n > budget:
        raise BudgetExceeded(
            f"Shell k={k} in dimension {n} has too many points to list",
            {"k": k, "n": n, "budget": budget},
        )
    points = ball_points_array(n, R)
    q = np.einsum("ij,ij->i", points, points)
    return points[(q >= 4 ** (k - 1)) & (q < 4 ** k)]


def _shell_points_near(
    center: List[Fraction], r: Fraction, k: int, width: Fraction, budget: int
) -> np.ndarray:
    """Canonical i with exp_index(i) = k and |(c, i)| - width < r ||i||"""
    n = len(center)
    R = 2 ** k
    c = np.array([float(x) for x in center])
    p = int(np.argmax(np.abs(c)))
    if c[p] == 0.0 or n == 1:
        candidates = _shell_points(n, k, budget)
    else:
        if (2 * R + 1) ** (n - 1) > budget:
            raise BudgetExceeded(
                f"Shell k={k} in dimension {n} is too large to sweep",
                {"k": k, "n": n, "budget": budget},
            )
        others = [j for j in range(n) if j != p]
        axes = [np.arange(-R, R + 1, dtype=np.int64)] * (n - 1)
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n - 1)
        grid = grid[np.einsum("ij,ij->i", grid, grid) < 4 ** k]
        s = grid.astype(float) @ c[others]
        # |c_p i_p + s| < r 2^k + width, padded for rounding
        reach = float(r) * R + float(width)
        pad = 1e-9 * (reach + np.abs(s) + abs(c[p]) * R) + 1.0
        ends = np.stack([(-s - reach) / c[p], (-s + reach) / c[p]])
        lo = np.maximum(np.floor(ends.min(axis=0) - pad / abs(c[p])), -R).astype(np.int64)
        hi = np.minimum(np.ceil(ends.max(axis=0) + pad / abs(c[p])), R).astype(np.int64)
        counts = np.maximum(hi - lo + 1, 0)
        total = int(counts.sum())
        if total > budget:
            raise BudgetExceeded(
                f"Band sweep for shell k={k} needs {total} candidates",
                {"k": k, "candidates": total, "budget": budget},
            )
        candidates = np.zeros((total, n), dtype=np.int64)
        candidates[:, others] = np.repeat(grid, counts, axis=0)
        offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        candidates[:, p] = np.repeat(lo, counts) + offsets
        q = np.einsum("ij,ij->i", candidates, candidates)
        candidates = candidates[(q >= 4 ** (k - 1)) & (q < 4 ** k)]

    candidates = candidates[_canonical_mask(candidates)]
    if candidates.shape[0] == 0:
        return candidates

    q = np.einsum("ij,ij->i", candidates, candidates).astype(float)
    lhs = np.abs(candidates.astype(float) @ c) - float(width)
    rhs = float(r) * np.sqrt(q)
    tol = 8.0 * (n + 2) * np.finfo(float).eps * (np.abs(c).sum() * R + float(r) * R + float(width)) + 1e-300
    sure = lhs < rhs - tol
    unsure = np.flatnonzero(~sure & (lhs <= rhs + tol))
    keep = sure
    for idx in unsure:
        i = [int(x) for x in candidates[idx]]
        gap = abs(sum(ci * x for ci, x in zip(center, i))) - width
        keep[idx] = gap < 0 or gap * gap < r * r * norm_sq(i)
    return candidates[keep]


def candidate_band_set(
    a: DecreasingSequence,
    rho: Union[RhoSequence, DecreasingSequence],
    r,
    K: int,
    n: Optional[int] = None,
    center: Optional[Center] = None,
    budget: int = DEFAULT_BAND_BUDGET,
) -> BandSet:
    """
    Bands with exp_index(i) <= K and a_k/2^(k+1) < r, one per antipodal pair.

    With a center, only bands that meet the open ball B(center, r) are kept,
    i.e. |(center, i)| - rho_k a_k < r ||i||.
    """
    rho = _as_rho(rho)
    r = Fraction(r)
    c = _center_fractions(center) if center is not None else None
    if c is not None:
        n = len(c)
    if n is None or n < 1:
        raise PreconditionFailed("candidate bands need the dimension n or a center")
    shells = admissible_shells(a, r, K)
    rho.check_domain(K)

    blocks, ks, widths = [], [], {}
    for k in shells:
        width = band_halfwidth(a, rho, k)
        if c is None:
            points = _shell_points(n, k, budget)
            points = points[_canonical_mask(points)]
        else:
            points = _shell_points_near(c, r, k, width, budget)
        if points.shape[0] == 0:
            continue
        blocks.append(points)
        ks.append(np.full(points.shape[0], k, dtype=np.int64))
        widths[k] = width

    if not blocks:
        return BandSet.empty(n)
    band_set = BandSet(n, np.concatenate(blocks), np.concatenate(ks), widths)
    logger.debug("Candidate bands collected", {"r": float(r), "K": K, "bands": len(band_set)})
    return band_set


def candidate_bands(
    a: DecreasingSequence,
    rho: Union[RhoSequence, DecreasingSequence],
    r,
    K: int,
    n: Optional[int] = None,
    center: Optional[Center] = None,
    budget: int = DEFAULT_BAND_BUDGET,
) -> List[Band]:
    """
    List form of candidate_band_set.

    Examples:
        >>> a = DecreasingSequence.geometric(1, 1)
        >>> sorted({b.k for b in candidate_bands(a, a, Fraction(1, 32), 4, n=2)})
        [3, 4]
    """
    return candidate_band_set(a, rho, r, K, n, center, budget).to_bands()


def exclusion_threshold(a: DecreasingSequence, rho: Union[RhoSequence, DecreasingSequence], K: int) -> Fraction:
    """
    Rational lower bound on min_{1<=k<=K} (1 - rho_k) a_k / 2^k.

    When the center lies in C(a) up to K, no band of shell <= K meets the
    ball of any smaller radius. Zero when some rho_k >= 1.
    """
    rho = _as_rho(rho)
    best = None
    for k in range(1, K + 1):
        gap = a.term(k).lower_fraction(EXACT_BITS) - (rho.term(k) * a.term(k)).upper_fraction(EXACT_BITS)
        value = max(Fraction(0), gap) / 2 ** k
        best = value if best is None else min(best, value)
    return best if best is not None else Fraction(0)


# ----------------------------------------------------------------------
# Shell combinatorics
# ----------------------------------------------------------------------

def shell_count(n: int, k: int, budget: Optional[int] = DEFAULT_BAND_BUDGET) -> int:
    """
    Exact #{i in Z^n \\ 0 : exp_index(i) = k}, i.e. 4^(k-1) <= ||i||^2 < 4^k.

    Examples:
        >>> [shell_count(1, 1), shell_count(2, 1), shell_count(1, 2)]
        [2, 8, 4]
    """
    if n < 1 or k < 1:
        raise PreconditionFailed(f"shell_count needs n, k >= 1, got {(n, k)}")
    return count_ball(n, 4 ** k - 1, budget) - count_ball(n, 4 ** (k - 1) - 1, budget)


def shell_bound(n: int, k: int) -> int:
    """The cube bound 2^((k+1)n) on shell_count"""
    return 2 ** ((k + 1) * n)


def tail_sum(n: int, K: int, budget: Optional[int] = DEFAULT_BAND_BUDGET) -> Fraction:
    """
    sum over 0 < exp_index(i) <= K of 2^(-exp_index(i)(n+1)), exactly.

    Examples:
        >>> tail_sum(1, 1), tail_sum(2, 1)
        (Fraction(1, 2), Fraction(1, 1))
    """
    return sum(
        (Fraction(shell_count(n, k, budget), 2 ** (k * (n + 1))) for k in range(1, K + 1)),
        Fraction(0),
    )


def truncation_tail(n: int, d: int, K: int, C) -> float:
    """
    C 2^(1/d) sum_{k>K} 2^((k+1)n) 2^(-k(n+1)) = C 2^(1/d) 2^n 2^(-K),
    the share of the union bound left out by stopping at shell K.
    """
    if C < 0:
        raise PreconditionFailed(f"Tail constant must be nonnegative, got {C}")
    return float(C) * 2.0 ** (1.0 / d) * 2.0 ** (n - K)
