"""Integer points in euclidean balls: streams, numpy blocks and exact counts"""

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Optional, Sequence

import numpy as np

from modules.lattice.target import IntVector
from shared.errors import BudgetExceeded


def radius_limit(R) -> int:
    """floor(R^2) computed exactly, so that ||i|| <= R iff ||i||^2 <= radius_limit(R)"""
    r = Fraction(R)
    if r < 0:
        return -1
    square = r * r
    return square.numerator // square.denominator


def enumerate_ball(n: int, R, first: Optional[Sequence[int]] = None) -> Iterator[IntVector]:
    """
    Stream one representative of each pair {i, -i} with 0 < ||i|| <= R.

    The representative has its first nonzero coordinate positive. When
    first is given only vectors whose leading coordinate lies in it are
    produced (used to partition the stream across workers).

    Examples:
        >>> sorted(enumerate_ball(2, 1))
        [(0, 1), (1, 0)]
    """
    limit = radius_limit(R)
    if limit < 1 or n < 1:
        return
    top = math.isqrt(limit)
    leading = range(0, top + 1) if first is None else sorted(set(first))
    for c in leading:
        if c < 0 or c * c > limit:
            continue
        rest = limit - c * c
        if c > 0:
            for tail in _free_points(n - 1, rest):
                yield (c,) + tail
        else:
            for tail in _canonical_points(n - 1, rest):
                yield (0,) + tail


def _free_points(n: int, limit: int) -> Iterator[IntVector]:
    if n == 0:
        yield ()
        return
    s = math.isqrt(limit)
    for c in range(-s, s + 1):
        for tail in _free_points(n - 1, limit - c * c):
            yield (c,) + tail


def _canonical_points(n: int, limit: int) -> Iterator[IntVector]:
    if n == 0:
        return
    s = math.isqrt(limit)
    for c in range(0, s + 1):
        if c > 0:
            for tail in _free_points(n - 1, limit - c * c):
                yield (c,) + tail
        else:
            yield from ((0,) + tail for tail in _canonical_points(n - 1, limit))


def ball_points_array(n: int, R, first: Optional[Sequence[int]] = None) -> np.ndarray:
    """Canonical representatives of the ball as an (N, n) int64 array"""
    limit = radius_limit(R)
    if limit < 1:
        return np.zeros((0, n), dtype=np.int64)
    s = math.isqrt(limit)
    axes = [np.arange(-s, s + 1, dtype=np.int64)] * n
    if first is not None:
        axes[0] = np.array(sorted(set(first)), dtype=np.int64)
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    grid = grid[np.einsum("ij,ij->i", grid, grid) <= limit]
    return grid[_canonical_mask(grid)]


def _canonical_mask(points: np.ndarray) -> np.ndarray:
    nonzero = points != 0
    has_nonzero = nonzero.any(axis=1)
    first_index = np.argmax(nonzero, axis=1)
    lead = points[np.arange(points.shape[0]), first_index]
    return has_nonzero & (lead > 0)


def canonicalize_rows(points: np.ndarray) -> np.ndarray:
    """Flip rows so that the first nonzero coordinate is positive"""
    mask = _canonical_mask(points)
    nonzero_rows = (points != 0).any(axis=1)
    flip = nonzero_rows & ~mask
    out = points.copy()
    out[flip] = -out[flip]
    return out


@lru_cache(maxsize=None)
def _count_ball(n: int, limit: int) -> int:
    if limit < 0:
        return 0
    if n == 0:
        return 1
    s = math.isqrt(limit)
    if n == 1:
        return 2 * s + 1
    return sum(_count_ball(n - 1, limit - c * c) for c in range(-s, s + 1))


def count_ball(n: int, limit: int, budget: Optional[int] = None) -> int:
    """
    Exact #{i in Z^n : ||i||^2 <= limit}, zero vector included.

    Args:
        budget: cap on the (2*sqrt(limit)+1)^(n-1) work estimate
    """
    if limit < 0:
        return 0
    work = (2 * math.isqrt(limit) + 1) ** max(n - 1, 0)
    if budget is not None and work > budget:
        raise BudgetExceeded(
            f"Counting lattice points in dimension {n} up to norm^2 {limit} needs ~{work} steps",
            {"n": n, "limit": limit, "budget": budget},
        )
    return _count_ball(n, limit)
