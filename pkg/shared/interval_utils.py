"""
Certified interval helpers

Two flavours are used across the package:
  - scalar enclosures through the mpmath interval context (iv), which rounds
    outward on every operation;
  - batch enclosures over many boxes at once in numpy, padded outward by a
    relative margin that dominates the accumulated rounding error.
"""

from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple

import numpy as np
from mpmath import iv

# Outward padding applied to batch numpy enclosures, relative to the
# magnitude of the evaluated terms
BATCH_RELATIVE_PAD = 1e-12


def to_interval(value) -> "iv.mpf":
    """Tight interval containing an int, Fraction, float or (lo, hi) pair"""
    if isinstance(value, tuple):
        lo, hi = value
        return iv.mpf([to_interval(lo).a, to_interval(hi).b])
    if isinstance(value, Fraction):
        return iv.mpf(value.numerator) / iv.mpf(value.denominator)
    return iv.mpf(value)


def interval_bounds(x) -> Tuple[float, float]:
    """Float bounds guaranteed to contain the interval x"""
    lo = float(x.a)
    hi = float(x.b)
    return float(np.nextafter(lo, -np.inf)), float(np.nextafter(hi, np.inf))


def interval_abs_max(x) -> float:
    """Upper bound on |t| over the interval"""
    lo, hi = interval_bounds(x)
    return max(abs(lo), abs(hi))


def interval_abs_min(x) -> float:
    """Lower bound on |t| over the interval (0 when it straddles zero)"""
    lo, hi = interval_bounds(x)
    if lo <= 0.0 <= hi:
        return 0.0
    return float(np.nextafter(min(abs(lo), abs(hi)), -np.inf))


def box_intervals(lo: Sequence[float], hi: Sequence[float]) -> List["iv.mpf"]:
    """Per-axis intervals of the box [lo, hi]"""
    return [iv.mpf([float(a), float(b)]) for a, b in zip(lo, hi)]


def poly_enclosure(terms: Iterable[Tuple[Tuple[int, ...], Fraction]], box: Sequence["iv.mpf"]) -> "iv.mpf":
    """
    Enclose a polynomial given as (exponents, coefficient) pairs over a box.

    Examples:
        >>> x = poly_enclosure([((2,), Fraction(1))], [iv.mpf([-1, 1])])
        >>> (float(x.a), float(x.b))
        (0.0, 1.0)
    """
    total = iv.mpf(0)
    for exponents, coef in terms:
        term = to_interval(Fraction(coef))
        for axis, e in enumerate(exponents):
            if e:
                term = term * box[axis] ** int(e)
        total = total + term
    return total


# ----------------------------------------------------------------------
# Batch (numpy) enclosures over many boxes
# ----------------------------------------------------------------------

def batch_power(lo: np.ndarray, hi: np.ndarray, e: int) -> Tuple[np.ndarray, np.ndarray]:
    """Exact range of t**e over [lo, hi], elementwise (before padding)"""
    if e == 0:
        return np.ones_like(lo), np.ones_like(hi)
    plo = lo ** e
    phi = hi ** e
    if e % 2 == 1:
        return plo, phi
    low = np.minimum(plo, phi)
    high = np.maximum(plo, phi)
    straddles = (lo < 0) & (hi > 0)
    low = np.where(straddles, 0.0, low)
    return low, high


def batch_mul(alo: np.ndarray, ahi: np.ndarray, blo: np.ndarray, bhi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Product of interval arrays"""
    p = np.stack([alo * blo, alo * bhi, ahi * blo, ahi * bhi])
    return p.min(axis=0), p.max(axis=0)


def batch_poly_enclosure(
    terms: Sequence[Tuple[Tuple[int, ...], float]],
    lo: np.ndarray,
    hi: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Enclose a polynomial over N boxes at once.

    Args:
        terms: (exponents, float coefficient) pairs
        lo, hi: (N, d) arrays of box corners

    Returns:
        (low, high) arrays of shape (N,), padded outward
    """
    n_boxes = lo.shape[0]
    total_lo = np.zeros(n_boxes)
    total_hi = np.zeros(n_boxes)
    magnitude = np.zeros(n_boxes)
    for exponents, coef in terms:
        tlo = np.full(n_boxes, 1.0)
        thi = np.full(n_boxes, 1.0)
        for axis, e in enumerate(exponents):
            if e:
                plo, phi = batch_power(lo[:, axis], hi[:, axis], int(e))
                tlo, thi = batch_mul(tlo, thi, plo, phi)
        c = float(coef)
        if c >= 0:
            tlo, thi = c * tlo, c * thi
        else:
            tlo, thi = c * thi, c * tlo
        total_lo += tlo
        total_hi += thi
        magnitude += np.maximum(np.abs(tlo), np.abs(thi))
    return pad_outward(total_lo, total_hi, magnitude)


def pad_outward(lo: np.ndarray, hi: np.ndarray, magnitude: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Widen [lo, hi] by BATCH_RELATIVE_PAD times the term magnitude"""
    pad = BATCH_RELATIVE_PAD * magnitude + np.finfo(float).tiny
    return lo - pad, hi + pad
