"""
Empirical harnesses for the sublevel-set inequalities

Each check measures a left-hand side volume, evaluates the right-hand side
formula with caller-supplied (or calibrated) constants and records whether
lhs - error <= rhs.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from modules.classes.bands import Band
from modules.exterior.subgroup import DiscreteSubgroup, ht_subgroup_norm
from modules.lattice.flow import g_flow
from modules.lattice.shortest import DEFAULT_DELTA_BUDGET, delta
from modules.lattice.target import norm_sq
from modules.maps.polynomial import PolynomialMap, ScalarPolynomial
from modules.measure.estimators import (
    GRID,
    MONTECARLO,
    Region,
    VolumeEstimate,
    band_preimage_volume,
    montecarlo_volume,
    sample_chunk,
    sublevel_volume,
    sup_norm,
)
from shared.errors import DegenerateFit, PreconditionFailed
from shared.geometry import Ball, ball_volume
from shared.logger import get_logger
from shared.rational_utils import format_float
from shared.report_writer import write_csv_report

logger = get_logger()

CHECKED = "checked"
SKIPPED = "skipped"
REPORT_COLUMNS = ["id", "lhs", "lhs_err", "rhs", "satisfied", "margin"]


@dataclass(frozen=True)
class BoundReport:
    """One instance of lhs <= rhs; satisfied iff lhs.value - lhs.error <= rhs"""
    id: str
    lhs: Optional[VolumeEstimate]
    rhs: float
    constants: Dict[str, Any] = field(default_factory=dict)
    status: str = CHECKED
    reason: str = ""

    @property
    def satisfied(self) -> bool:
        if self.status == SKIPPED:
            return True
        return self.lhs.value - self.lhs.error <= self.rhs

    @property
    def margin(self) -> float:
        if self.status == SKIPPED:
            return math.nan
        return self.rhs - self.lhs.value

    def to_row(self) -> List[Any]:
        if self.status == SKIPPED:
            return [self.id, "", "", "", SKIPPED, ""]
        return [
            self.id,
            format_float(self.lhs.value),
            format_float(self.lhs.error),
            format_float(self.rhs),
            str(self.satisfied).lower(),
            format_float(self.margin),
        ]

    def to_dict(self) -> Dict[str, Any]:
        doc = {"id": self.id, "status": self.status, "constants": self.constants}
        if self.status == SKIPPED:
            doc["reason"] = self.reason
        else:
            doc.update({"lhs": self.lhs.to_dict(), "rhs": self.rhs,
                        "satisfied": self.satisfied, "margin": self.margin})
        return doc


def write_bound_reports(reports: Sequence[BoundReport], path) -> Path:
    return write_csv_report(path, "bound_report", REPORT_COLUMNS, [r.to_row() for r in reports])


# ----------------------------------------------------------------------
# Sublevel lemma
# ----------------------------------------------------------------------

def ctau_check(
    g: ScalarPolynomial,
    region: Region,
    C: float,
    tau: float,
    eps_grid: Sequence[float],
    method: str = GRID,
    budget: int = 1 << 16,
    seed: int = 0,
) -> List[BoundReport]:
    """
    Vol{x in region : |g| <= eps} <= C (eps / ||g||)^tau Vol(region) for each eps.

    The certified upper end of the sup-norm bracket is used, which can only
    shrink the right-hand side.
    """
    if g.is_zero:
        raise PreconditionFailed("The sublevel lemma needs a function that is not identically zero")
    norm = sup_norm(g, region).upper
    if norm <= 0:
        raise PreconditionFailed("The sublevel lemma needs a function that is not identically zero")
    volume = region.volume
    reports = []
    for index, eps in enumerate(eps_grid):
        lhs = sublevel_volume(g, region, float(eps), method, budget, seed)
        rhs = C * (float(eps) / norm) ** tau * volume
        reports.append(BoundReport(f"ctau-{index}", lhs, rhs, {"C": C, "tau": tau, "eps": float(eps), "sup": norm}))
    failed = sum(1 for r in reports if not r.satisfied)
    logger.info("Sublevel lemma checked", {"instances": len(reports), "failed": failed})
    return reports


# ----------------------------------------------------------------------
# Band preimages
# ----------------------------------------------------------------------

def km_rhs_form(f: PolynomialMap, i: Sequence[int], a: float, r: float) -> float:
    """(a ||i||^n)^(1/(d l (n+1))) r^(-1/d) Vol(B(0, r)), the bound without its constant"""
    n, d, l = f.n, f.d, f.l
    if a <= 0:
        return 0.0
    base = a * math.sqrt(norm_sq(i)) ** n
    return base ** (1.0 / (d * l * (n + 1))) * r ** (-1.0 / d) * ball_volume(d, r)


def km_side_conditions(f: PolynomialMap, i: Sequence[int], a: float, r: float, A: float) -> Tuple[bool, str]:
    n, l = f.n, f.l
    norm = math.sqrt(norm_sq(i))
    if a > norm:
        return False, "a > ||i||"
    if (a * norm ** n) ** (1.0 / (n + 1)) > A * r ** l:
        return False, "(a ||i||^n)^(1/(n+1)) > A r^l"
    return True, ""


def km_bound_check(
    f: PolynomialMap,
    i: Sequence[int],
    a: float,
    r: float,
    C: float,
    A: float,
    method: str = MONTECARLO,
    budget: int = 1 << 18,
    seed: int = 0,
    report_id: Optional[str] = None,
) -> BoundReport:
    """
    Vol{x in B(0,r) : |(f(x), i)| <= a} <= C (a ||i||^n)^(1/(dl(n+1))) r^(-1/d) Vol(B(0,r)),
    skipped when a side condition fails.
    """
    report_id = report_id or f"km-{'_'.join(str(c) for c in i)}-{a:.3g}"
    constants = {"C": C, "A": A, "a": a, "r": r, "i": list(i)}
    holds, reason = km_side_conditions(f, i, a, r, A)
    if not holds:
        return BoundReport(report_id, None, math.nan, constants, SKIPPED, reason)
    band = Band(tuple(int(c) for c in i), 0, Fraction(max(a, 0)))
    lhs = band_preimage_volume(f, band, r, method, budget, seed)
    rhs = C * km_rhs_form(f, i, a, r)
    return BoundReport(report_id, lhs, rhs, constants)


# ----------------------------------------------------------------------
# Fits
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class LogLogFit:
    """log y = slope log x + intercept"""
    slope: float
    intercept: float
    r_value: float
    points: int

    @property
    def constant(self) -> float:
        return math.exp(self.intercept)


def loglog_fit(xs: Sequence[float], ys: Sequence[float]) -> LogLogFit:
    pairs = [(x, y) for x, y in zip(xs, ys) if x > 0 and y > 0]
    if len(pairs) < 3:
        raise DegenerateFit(f"Log-log fit needs at least 3 positive points, got {len(pairs)}",
                            {"points": len(pairs)})
    lx = np.log([p[0] for p in pairs])
    ly = np.log([p[1] for p in pairs])
    if np.ptp(lx) == 0:
        raise DegenerateFit("Log-log fit needs distinct abscissae")
    fit = stats.linregress(lx, ly)
    return LogLogFit(float(fit.slope), float(fit.intercept), float(fit.rvalue), len(pairs))


def calibrate_constant(lhs: Sequence[VolumeEstimate], forms: Sequence[float], safety: float = 1.0) -> float:
    """Smallest C with lhs.upper <= C form on every calibration instance, times safety"""
    ratios = [e.upper / form for e, form in zip(lhs, forms) if form > 0]
    if not ratios:
        raise DegenerateFit("No calibration instance has a positive right-hand side")
    return safety * max(ratios)


@dataclass(frozen=True)
class CalibratedCheck:
    """Constant fitted on one instance set and checked on another"""
    constant: float
    calibration: List[BoundReport]
    validation: List[BoundReport]

    @property
    def passed(self) -> bool:
        return all(r.satisfied for r in self.validation)


def calibrated_check(
    measure: Callable[[Any], VolumeEstimate],
    form: Callable[[Any], float],
    calibration: Sequence[Any],
    validation: Sequence[Any],
    safety: float = 2.0,
    label: str = "instance",
) -> CalibratedCheck:
    """
    Fit C on the calibration instances, then test lhs <= C form on the
    validation instances.
    """
    cal_lhs = [measure(x) for x in calibration]
    cal_forms = [form(x) for x in calibration]
    C = calibrate_constant(cal_lhs, cal_forms, safety)

    def report(prefix: str, index: int, lhs: VolumeEstimate, rhs_form: float) -> BoundReport:
        return BoundReport(f"{label}-{prefix}-{index}", lhs, C * rhs_form, {"C": C})

    cal_reports = [report("cal", k, e, fm) for k, (e, fm) in enumerate(zip(cal_lhs, cal_forms))]
    val_reports = [report("val", k, measure(x), form(x)) for k, x in enumerate(validation)]
    return CalibratedCheck(C, cal_reports, val_reports)


# ----------------------------------------------------------------------
# Growth of h_t(x) Gamma
# ----------------------------------------------------------------------

def _ball_probe_points(d: int, r: float, samples: int, seed: int) -> np.ndarray:
    """Uniform points of B(0, r) together with their radial projections to the sphere"""
    points = sample_chunk(Ball.centered(d, r), 0, samples, seed)
    norms = np.linalg.norm(points, axis=1)
    shell = points[norms > 0] * (r / norms[norms > 0])[:, None]
    return np.concatenate([points, shell])


def growth_exponent_fit(
    f: PolynomialMap,
    gamma: DiscreteSubgroup,
    t: float,
    radii: Sequence[float],
    samples: int = 2048,
    seed: int = 0,
) -> LogLogFit:
    """
    Fit s(r) = sup_{x in B(0,r)} ||h_t(x) Gamma|| - ||h_t(0) Gamma|| ~ A r^l_fit.

    The returned fit's constant is A and its slope is l_fit.
    """
    if len(radii) < 3:
        raise DegenerateFit(f"Growth fit needs at least 3 radii, got {len(radii)}")
    origin = np.zeros(f.d)
    floor = ht_subgroup_norm(f, origin, t, gamma)
    increments = []
    for index, r in enumerate(radii):
        probes = _ball_probe_points(f.d, float(r), samples, seed + index)
        values = [ht_subgroup_norm(f, x, t, gamma) for x in probes]
        increments.append(max(values) - floor)
    if max(increments) <= 0:
        raise DegenerateFit("||h_t(x) Gamma|| does not grow on the sampled balls")
    return loglog_fit(radii, increments)


# ----------------------------------------------------------------------
# Short vectors along the flow
# ----------------------------------------------------------------------

def flowed_embedding_delta(values: np.ndarray, t: float, node_budget: int = DEFAULT_DELTA_BUDGET) -> np.ndarray:
    """delta(g_t [y]) for each row y of an (N, n) array, float precision"""
    values = np.atleast_2d(values)
    n = values.shape[1]
    flow = g_flow(t, n)
    out = np.empty(values.shape[0])
    eye = np.eye(n)
    for row, y in enumerate(values):
        gamma = DiscreteSubgroup(flow.apply(np.hstack([eye, y[:, None]])))
        out[row] = delta(gamma, node_budget=node_budget, certify=False).value
    return out


def flow_volume_check(
    f: PolynomialMap,
    t: float,
    eps: float,
    r: float,
    C: float,
    samples: int = 4096,
    seed: int = 0,
    report_id: Optional[str] = None,
    node_budget: int = DEFAULT_DELTA_BUDGET,
) -> BoundReport:
    """
    Vol{x in B(0,r) : delta(g_t [f(x)]) <= eps} <= C (eps / r^l)^(1/(dl)) r^d.
    """
    d, l = f.d, f.l
    if eps < 0 or r <= 0:
        raise PreconditionFailed(f"Need eps >= 0 and r > 0, got eps={eps}, r={r}")

    def predicate(points: np.ndarray) -> np.ndarray:
        return flowed_embedding_delta(f.evaluate_points(points), t, node_budget) <= eps

    lhs = montecarlo_volume(Ball.centered(d, r), predicate, samples, seed)
    rhs = C * (eps / r ** l) ** (1.0 / (d * l)) * r ** d
    return BoundReport(
        report_id or f"flow-{t:.3g}-{eps:.3g}-{r:.3g}",
        lhs,
        rhs,
        {"C": C, "t": t, "eps": eps, "r": r},
    )
