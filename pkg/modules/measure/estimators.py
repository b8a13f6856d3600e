"""
Volume estimators for sublevel sets and band preimages

Monte-Carlo draws come from a counter-based Philox stream: chunk c of the
sample sequence always uses Philox(key=seed) jumped c times, so totals do not
depend on how chunks are spread across workers. Grid estimates classify the
cells of a uniform subdivision with certified enclosures and are rigorous.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Tuple, Union

import numpy as np
from scipy import stats

from modules.classes.bands import Band
from modules.maps.bounds import grid_cells
from modules.maps.polynomial import PolynomialMap, ScalarPolynomial
from shared.errors import BudgetExceeded, PreconditionFailed
from shared.geometry import Ball, Hypercube
from shared.logger import get_logger

logger = get_logger()

MIN_BUDGET = 1000
CHUNK_SIZE = 1 << 16
CONFIDENCE = 0.95
GRID = "grid"
MONTECARLO = "montecarlo"

Region = Union[Hypercube, Ball]
PointPredicate = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class VolumeEstimate:
    """
    value +- error. Monte-Carlo errors are 95% Clopper-Pearson half-widths,
    grid errors are rigorous.
    """
    value: float
    error: float
    method: str
    samples: int
    seed: Optional[int] = None
    hits: Optional[int] = None

    @property
    def lower(self) -> float:
        return max(0.0, self.value - self.error)

    @property
    def upper(self) -> float:
        return self.value + self.error

    def scaled(self, factor: float) -> "VolumeEstimate":
        return VolumeEstimate(self.value * factor, self.error * factor, self.method,
                              self.samples, self.seed, self.hits)

    def to_dict(self):
        return {
            "value": self.value,
            "error": self.error,
            "method": self.method,
            "samples": self.samples,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class SupNormBracket:
    """lower <= sup |g| <= upper"""
    lower: float
    upper: float


def clopper_pearson(hits: int, trials: int, confidence: float = CONFIDENCE) -> Tuple[float, float]:
    """Exact binomial confidence interval for hits / trials"""
    if trials <= 0:
        return 0.0, 1.0
    tail = (1.0 - confidence) / 2.0
    lo = 0.0 if hits == 0 else float(stats.beta.ppf(tail, hits, trials - hits + 1))
    hi = 1.0 if hits == trials else float(stats.beta.ppf(1.0 - tail, hits + 1, trials - hits))
    return lo, hi


def _region_volume(region: Region) -> float:
    return region.volume


def _proposal_cube(region: Region) -> Hypercube:
    return region.enclosing_cube() if isinstance(region, Ball) else region


def sample_chunk(region: Region, chunk: int, size: int, seed: int) -> np.ndarray:
    """
    Points of chunk `chunk` inside region: `size` uniform proposals from the
    enclosing cube, rejected outside a ball.
    """
    rng = np.random.Generator(np.random.Philox(key=seed).jumped(chunk))
    cube = _proposal_cube(region)
    points = cube.scale(rng.random((size, cube.dimension)))
    if isinstance(region, Ball):
        points = points[region.contains(points)]
    return points


def iter_chunks(total: int, chunk_size: int = CHUNK_SIZE) -> Iterator[Tuple[int, int]]:
    for index, start in enumerate(range(0, total, chunk_size)):
        yield index, min(chunk_size, total - start)


def montecarlo_count(
    region: Region,
    predicate: PointPredicate,
    samples: int,
    seed: int,
    workers: int = 1,
    chunk_size: int = CHUNK_SIZE,
) -> Tuple[int, int]:
    """(hits, accepted) over `samples` proposals; exact integer reduction"""
    def run(job: Tuple[int, int]) -> Tuple[int, int]:
        index, size = job
        points = sample_chunk(region, index, size, seed)
        if points.shape[0] == 0:
            return 0, 0
        return int(np.count_nonzero(predicate(points))), int(points.shape[0])

    jobs = list(iter_chunks(samples, chunk_size))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(run, jobs))
    else:
        counts = [run(job) for job in jobs]
    return sum(c[0] for c in counts), sum(c[1] for c in counts)


def montecarlo_volume(
    region: Region,
    predicate: PointPredicate,
    samples: int,
    seed: int,
    workers: int = 1,
) -> VolumeEstimate:
    if samples < MIN_BUDGET:
        raise BudgetExceeded(f"Monte-Carlo budget {samples} is below {MIN_BUDGET} samples",
                             {"samples": samples, "minimum": MIN_BUDGET})
    hits, accepted = montecarlo_count(region, predicate, samples, seed, workers)
    volume = _region_volume(region)
    if accepted == 0:
        return VolumeEstimate(0.0, volume, MONTECARLO, 0, seed, 0)
    p = hits / accepted
    lo, hi = clopper_pearson(hits, accepted)
    return VolumeEstimate(volume * p, volume * max(p - lo, hi - p), MONTECARLO, accepted, seed, hits)


def _grid_for_region(region: Region, cells: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Cells of a uniform grid on the proposal cube, with masks for cells fully
    inside the region and cells that meet it.
    """
    cube = _proposal_cube(region)
    lo, hi = grid_cells(cube, cells)
    if isinstance(region, Hypercube):
        everything = np.ones(lo.shape[0], dtype=bool)
        return lo, hi, everything, everything
    center = np.asarray(region.center, dtype=float)
    far = np.maximum(np.abs(lo - center), np.abs(hi - center))
    near = np.maximum(np.maximum(lo - center, center - hi), 0.0)
    r2 = region.radius ** 2
    inside = np.einsum("ij,ij->i", far, far) <= r2
    meets = np.einsum("ij,ij->i", near, near) <= r2
    return lo, hi, inside, meets


def grid_sublevel_volume(g: ScalarPolynomial, region: Region, eps: float, cells: int) -> VolumeEstimate:
    """
    Cells are in (enclosure within [-eps, eps] and fully in the region), out
    (enclosure avoids the band or the cell misses the region) or undecided.
    Returns the midpoint of [in, in + undecided] volume with half its width.
    """
    lo, hi, inside, meets = _grid_for_region(region, cells)
    low, high = g.enclose(lo, hi)
    cell_volume = float(np.prod(hi[0] - lo[0]))
    certain = inside & (low >= -eps) & (high <= eps)
    excluded = ~meets | (low > eps) | (high < -eps)
    undecided = ~certain & ~excluded
    inner = certain.sum() * cell_volume
    slack = undecided.sum() * cell_volume
    region_volume = _region_volume(region)
    value = min(inner + slack / 2.0, region_volume)
    return VolumeEstimate(value, slack / 2.0, GRID, int(lo.shape[0]))


def sublevel_volume(
    g: Union[ScalarPolynomial, PointPredicate],
    region: Region,
    eps: float,
    method: str = GRID,
    budget: int = 1 << 16,
    seed: int = 0,
    workers: int = 1,
) -> VolumeEstimate:
    """
    Vol{x in region : |g(x)| <= eps}.

    Examples:
        >>> g = ScalarPolynomial.from_expression("x1", 1)
        >>> round(sublevel_volume(g, Hypercube((0.0,), (1.0,)), 0.1).value, 3)
        0.1
    """
    if eps < 0:
        raise PreconditionFailed(f"eps must be nonnegative, got {eps}")
    if budget < MIN_BUDGET:
        raise BudgetExceeded(f"Budget {budget} is below {MIN_BUDGET} cells or samples",
                             {"budget": budget, "minimum": MIN_BUDGET})
    if method == GRID:
        if not isinstance(g, ScalarPolynomial):
            raise PreconditionFailed("Grid estimates need a polynomial to enclose")
        return grid_sublevel_volume(g, region, eps, budget)
    if method == MONTECARLO:
        evaluate = g.evaluate_points if isinstance(g, ScalarPolynomial) else g
        return montecarlo_volume(region, lambda x: np.abs(evaluate(x)) <= eps, budget, seed, workers)
    raise PreconditionFailed(f"Unknown estimation method '{method}'")


def sup_norm(g: ScalarPolynomial, region: Region, budget: int = 1 << 14) -> SupNormBracket:
    """
    Bracket on sup |g| over the region: interval enclosures over the cells
    meeting it give the upper end, cell centres inside it the lower end.

    Examples:
        >>> b = sup_norm(ScalarPolynomial.from_expression("x1**2", 1), Hypercube((-1.0,), (1.0,)))
        >>> b.lower <= 1.0 <= b.upper
        True
    """
    lo, hi, inside, meets = _grid_for_region(region, budget)
    low, high = g.enclose(lo[meets], hi[meets])
    upper = float(max(np.abs(low).max(), np.abs(high).max()))

    probes = [(lo + hi) / 2.0]
    if isinstance(region, Hypercube):
        probes.extend([lo, hi])
    probes = np.concatenate(probes)
    if isinstance(region, Ball):
        probes = probes[region.contains(probes)]
    lower = float(np.abs(g.evaluate_points(probes)).max()) if probes.shape[0] else 0.0
    return SupNormBracket(min(lower, upper), upper)


def band_preimage_volume(
    f: PolynomialMap,
    band: Band,
    r: float,
    method: str = MONTECARLO,
    budget: int = 1 << 18,
    seed: int = 0,
    workers: int = 1,
) -> VolumeEstimate:
    """Vol{x in B(0, r) : |(f(x), i)| <= halfwidth} for the closed band"""
    if r <= 0:
        raise PreconditionFailed(f"Radius must be positive, got {r}")
    if band.halfwidth == 0:
        return VolumeEstimate(0.0, 0.0, method, 0, seed, 0)
    g = f.linear_form(band.i)
    return sublevel_volume(g, Ball.centered(f.d, r), float(band.halfwidth), method, budget, seed, workers)
