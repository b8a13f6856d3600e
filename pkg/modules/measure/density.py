"""
Density of f^{-1}(C(a')) at the origin

For each radius r the candidate bands are those meeting B(f(0), kappa r),
where kappa bounds the Lipschitz constant of f on B(0, r). Their preimages
cover everything f(B(0, r)) loses to the class, so the excluded measure is
bounded two ways:
  - a certified union bound, summing the sublevel lemma over the bands;
  - a Monte-Carlo estimate of the union itself, with a 95% upper limit.
The density lower bound uses the smaller of the two. Rows taken from the
Monte-Carlo limit hold with 95% confidence only and are marked uncertified.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from modules.classes.bands import BandSet, candidate_band_set, truncation_tail
from modules.classes.membership import membership
from modules.classes.sequences import DecreasingSequence, derived_sequence, rho_sequence
from modules.lattice.target import TargetVector
from modules.maps.bounds import grid_cells, lipschitz_bound
from modules.maps.curvature import curvature_check, multi_indices
from modules.maps.polynomial import PolynomialMap
from modules.measure.estimators import clopper_pearson, montecarlo_count
from shared.errors import ConfigError, PreconditionFailed
from shared.geometry import Ball, Hypercube, ball_volume
from shared.logger import get_logger
from shared.rational_utils import format_float
from shared.report_writer import read_csv_report, write_csv_report

logger = get_logger()

DENSITY_COLUMNS = [
    "r", "density_lb", "err", "bands_considered", "truncation_tail",
    "union_bound", "mc_excluded", "mc_upper", "source", "samples", "certified",
]
UNION = "union"
MONTECARLO = "montecarlo"
NO_BANDS = "none"
ENCLOSURE_CELLS = 256
CONSTANT_MAP_REACH = Fraction(1, 10 ** 12)


@dataclass(frozen=True)
class UnionBound:
    """Certified bound on the share of B(0, r) mapped into the bands"""
    fraction: float
    per_band: np.ndarray
    uncertified: int


@dataclass(frozen=True)
class DensityPoint:
    r: float
    density_lb: float
    err: float
    bands_considered: int
    truncation_tail: float
    union_bound: float
    mc_excluded: float
    mc_upper: float
    source: str
    samples: int

    @property
    def certified(self) -> bool:
        """False when density_lb rests on the Monte-Carlo 95% upper limit"""
        return self.source != MONTECARLO

    def to_row(self) -> List[Any]:
        return [
            format_float(self.r),
            format_float(self.density_lb),
            format_float(self.err),
            self.bands_considered,
            format_float(self.truncation_tail),
            format_float(self.union_bound),
            format_float(self.mc_excluded),
            format_float(self.mc_upper),
            self.source,
            self.samples,
            str(self.certified).lower(),
        ]


@dataclass
class DensityCurve:
    """
    Density lower bounds of the class truncated at shell K, one row per
    radius (strictly decreasing).
    """
    points: List[DensityPoint] = field(default_factory=list)
    K: int = 0
    seed: int = 0
    meta: Dict[str, Any] = field(default_factory=dict)

    @property
    def radii(self) -> List[float]:
        return [p.r for p in self.points]

    @property
    def densities(self) -> List[float]:
        return [p.density_lb for p in self.points]

    def write_csv(self, path) -> Path:
        return write_csv_report(path, "density_curve", DENSITY_COLUMNS, [p.to_row() for p in self.points])


def read_density_csv(path) -> List[Dict[str, Any]]:
    _, rows = read_csv_report(path)
    return [
        {
            "r": float(row["r"]),
            "density_lb": float(row["density_lb"]),
            "err": float(row["err"]),
            "bands_considered": int(row["bands_considered"]),
            "truncation_tail": float(row["truncation_tail"]),
            "source": row["source"],
            "certified": row["certified"] == "true",
        }
        for row in rows
    ]


# ----------------------------------------------------------------------
# Certified union bound
# ----------------------------------------------------------------------

def _component_ranges(f: PolynomialMap, beta, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """(n, 2) enclosure of d^beta f_c over the union of the cells"""
    out = np.zeros((f.n, 2))
    for c, component in enumerate(f.components):
        derivative = component.derivative(beta)
        if derivative.is_zero:
            continue
        low, high = derivative.enclose(lo, hi)
        out[c] = (low.min(), high.max())
    return out


def _pair_ranges(vectors: np.ndarray, ranges: np.ndarray):
    """Enclosures of (v, i) for every band normal i, v ranging over the box `ranges`"""
    lo = ranges[:, 0][None, :] * vectors
    hi = ranges[:, 1][None, :] * vectors
    low = np.minimum(lo, hi).sum(axis=1)
    high = np.maximum(lo, hi).sum(axis=1)
    pad = 1e-12 * np.maximum(np.abs(lo), np.abs(hi)).sum(axis=1) + np.finfo(float).tiny
    return low - pad, high + pad


def excluded_union_bound(f: PolynomialMap, bands: BandSet, r: float, l_max: Optional[int] = None) -> UnionBound:
    """
    Sum over bands of the sublevel-lemma bound on Vol{x in [-r, r]^d : |(f(x), i)| < w_i},
    divided by Vol(B(0, r)).

    For each band the lemma is tried with every order 1 <= l' <= l_max whose
    pure derivatives (d^l'_{x_j} f, i) are certified away from zero on the
    cube, and the smallest bound is kept; a band with no usable order counts
    as the whole ball.
    """
    d = f.d
    l_max = f.l if l_max is None else l_max
    ball = ball_volume(d, r)
    N = len(bands)
    if N == 0:
        return UnionBound(0.0, np.zeros(0), 0)

    cube = Hypercube.symmetric(d, r)
    lo, hi = grid_cells(cube, ENCLOSURE_CELLS)
    vectors = bands.vectors.astype(float)
    widths = bands.halfwidth_array

    # Lower bound on ||g_i||_K from probe points
    probes = np.concatenate([np.zeros((1, d)), lo, hi])
    values = f.evaluate_points(probes)
    sup_lower = np.zeros(N)
    chunk = max(1, (1 << 22) // max(1, probes.shape[0]))
    for start in range(0, N, chunk):
        block = np.abs(values @ vectors[start:start + chunk].T).max(axis=0)
        sup_lower[start:start + chunk] = block
    sup_lower *= 1.0 - 1e-12

    # sup |d^beta g_i| for |beta| <= l_max, cumulated by order
    sup_by_order = []
    running = np.zeros(N)
    for order in range(0, l_max + 1):
        for beta in multi_indices(d, order, order):
            low, high = _pair_ranges(vectors, _component_ranges(f, beta, lo, hi))
            running = np.maximum(running, np.maximum(np.abs(low), np.abs(high)))
        sup_by_order.append(running.copy())

    best = np.full(N, ball)
    for order in range(1, l_max + 1):
        m = np.full(N, np.inf)
        for axis in range(d):
            beta = tuple(order if a == axis else 0 for a in range(d))
            low, high = _pair_ranges(vectors, _component_ranges(f, beta, lo, hi))
            away = np.where((low > 0) | (high < 0), np.minimum(np.abs(low), np.abs(high)), 0.0)
            m = np.minimum(m, away)
        M = np.maximum(sup_by_order[order], m)
        usable = (m > 0) & (sup_lower > 0)
        if not usable.any():
            continue
        C = d * order * (order + 1) * (
            (M[usable] / m[usable]) * (order + 1) * (2 * order ** order + 1)
        ) ** (1.0 / order)
        ratio = np.minimum(widths[usable] / sup_lower[usable], 1.0)
        bound = C * ratio ** (1.0 / (d * order)) * cube.volume
        best[usable] = np.minimum(best[usable], bound)

    best = np.minimum(best, ball)
    uncertified = int(np.count_nonzero(best >= ball))
    return UnionBound(float(best.sum() / ball), best, uncertified)


# ----------------------------------------------------------------------
# Density curve
# ----------------------------------------------------------------------

def band_reach(f: PolynomialMap, r: float) -> Fraction:
    """
    Radius around f(0) holding f(B(0, r)); r * 10^-12 for a constant map.
    """
    kappa = lipschitz_bound(f, r)
    if kappa > 0:
        return Fraction(kappa * r)
    return Fraction(r) * CONSTANT_MAP_REACH



def check_density_preconditions(f: PolynomialMap, a: DecreasingSequence, K: int, workers: int = 1):
    """f(0) must lie in C(a) up to K and f must be curved at the origin"""
    center = TargetVector(f.value_at_origin())
    verdict = membership(center, a, K, workers=workers)
    if not verdict.in_class:
        raise PreconditionFailed(
            "f(0) is not in the class up to the cutoff",
            {"verdict": verdict.to_dict()},
        )
    report = curvature_check(f)
    if not report.is_curved:
        raise PreconditionFailed(
            f"f is not {f.l}-curved at the origin",
            {"rank": report.rank, "rank_with_value": report.rank_with_value},
        )


def density_curve(
    f: PolynomialMap,
    a: DecreasingSequence,
    n: int,
    d: int,
    l: int,
    radii: Sequence[float],
    K: int,
    samples: int = 10 ** 6,
    seed: int = 0,
    workers: int = 1,
    derived: Optional[DecreasingSequence] = None,
    tail_constant: float = 1.0,
    check_preconditions: bool = True,
) -> DensityCurve:
    """
    Lower bounds on Vol(B(0,r) cap f^{-1}(C_K(a'))) / Vol(B(0,r)) over radii.

    Args:
        derived: explicit band halfwidth sequence replacing a' (the bands
            then use it as both a and a', with rho = 1)
        tail_constant: constant C of the truncation tail estimate
        check_preconditions: require f(0) in C(a) up to K and curvature at 0
    """
    if f.n != n or f.d != d:
        raise ConfigError(f"Map is {f.d} -> {f.n} but n={n}, d={d} were requested")
    radii = [float(r) for r in radii]
    if not radii or any(r <= 0 for r in radii):
        raise ConfigError("Radii must be positive")
    if any(b >= a_ for a_, b in zip(radii, radii[1:])):
        raise ConfigError("Radii must be strictly decreasing")
    if check_preconditions:
        check_density_preconditions(f, a, K, workers)

    if derived is None:
        band_a = a
        band_rho = rho_sequence(a, n, d, l).rho
        derived = derived_sequence(a, n, d, l)
    else:
        band_a = derived
        band_rho = DecreasingSequence.geometric(1, 0)

    center = TargetVector(f.value_at_origin())
    tail = truncation_tail(n, d, K, tail_constant)
    curve = DensityCurve(K=K, seed=seed, meta={"derived": derived.to_dict(), "n": n, "d": d, "l": l})

    for r in radii:
        reach = band_reach(f, r)
        bands = candidate_band_set(band_a, band_rho, reach, K, center=center)
        if len(bands) == 0:
            point = DensityPoint(r, 1.0, 0.0, 0, tail, 0.0, 0.0, 0.0, NO_BANDS, 0)
            curve.points.append(point)
            logger.info("No candidate bands", {"r": r, "K": K})
            continue

        union = excluded_union_bound(f, bands, r, l)
        hits, accepted = montecarlo_count(
            Ball.centered(d, r),
            lambda x: bands.hit_mask(f.evaluate_points(x)),
            samples,
            seed,
            workers,
        )
        p = hits / accepted if accepted else 1.0
        mc_upper = clopper_pearson(hits, accepted)[1] if accepted else 1.0

        if union.fraction <= mc_upper:
            excluded, err, source = union.fraction, 0.0, UNION
        else:
            excluded, err, source = mc_upper, mc_upper - p, MONTECARLO
        density_lb = min(1.0, max(0.0, 1.0 - excluded))
        curve.points.append(DensityPoint(
            r, density_lb, err, len(bands), tail, union.fraction, p, mc_upper, source, accepted,
        ))
        logger.info("Density point", {
            "r": r, "bands": len(bands), "density_lb": density_lb, "source": source,
            "uncertified_bands": union.uncertified,
        })
    return curve


def band_picture(f: PolynomialMap, a: DecreasingSequence, n: int, d: int, l: int, r: float, K: int,
                 derived: Optional[DecreasingSequence] = None):
    """(center, reach, [(i, halfwidth)]) for drawing the candidate bands at radius r"""
    if derived is None:
        band_a, band_rho = a, rho_sequence(a, n, d, l).rho
    else:
        band_a, band_rho = derived, DecreasingSequence.geometric(1, 0)
    center = TargetVector(f.value_at_origin())
    reach = band_reach(f, r)
    bands = candidate_band_set(band_a, band_rho, reach, K, center=center)
    return center.float_shadow, float(reach), [(tuple(int(c) for c in b.i), float(b.halfwidth)) for b in bands.to_bands()]
