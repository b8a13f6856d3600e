"""
Verification suite behind the `verify` command

Each check turns one config block into a CheckResult: the bound reports it
produced (written to the bound-report CSV) and a pass flag. Exact checks
report their integers or dyadic values as zero-error estimates so every
instance shares the lhs/rhs layout.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List

import numpy as np

from modules.classes.bands import Band, shell_bound, shell_count, tail_sum
from modules.classes.sequences import DecreasingSequence, derived_sequence, rho_sequence
from modules.exterior.subgroup import DiscreteSubgroup
from modules.lattice.flow import lemma_check
from modules.lattice.shortest import DEFAULT_DELTA_BUDGET
from modules.lattice.sigma import sigma_profile
from modules.lattice.target import TargetVector, norm_sq
from modules.maps.bounds import derivative_bounds, km_constant
from modules.maps.polynomial import PolynomialMap, ScalarPolynomial
from modules.measure.bounds import (
    SKIPPED,
    BoundReport,
    calibrated_check,
    ctau_check,
    flow_volume_check,
    growth_exponent_fit,
    km_rhs_form,
    km_side_conditions,
    loglog_fit,
)
from modules.measure.estimators import GRID, VolumeEstimate, band_preimage_volume
from shared.errors import ConfigError
from shared.geometry import Hypercube
from shared.logger import get_logger
from shared.rational_utils import parse_rational

logger = get_logger()

EXACT = "exact"
FIT = "fit"


@dataclass
class CheckResult:
    name: str
    passed: bool
    reports: List[BoundReport] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "instances": len(self.reports),
            "failed": [r.id for r in self.reports if not r.satisfied],
            "details": self.details,
            "reports": [r.to_dict() for r in self.reports],
        }


def _exact(value: float, error: float = 0.0, method: str = EXACT) -> VolumeEstimate:
    return VolumeEstimate(float(value), float(error), method, 0)


def _engine(config: Dict[str, Any]) -> Dict[str, Any]:
    engine = config.get("engine", {})
    return {
        "engine": engine.get("sigma_engine", "auto"),
        "exhaustive_limit": engine.get("exhaustive_limit", 10 ** 6),
        "node_budget": engine.get("node_budget", 10 ** 9),
    }


def _bits(config: Dict[str, Any]) -> int:
    return config.get("engine", {}).get("snap_bits", 128)


def _delta_budget(config: Dict[str, Any]) -> int:
    return int(config.get("engine", {}).get("delta_node_budget", DEFAULT_DELTA_BUDGET))


def _block(block: Dict[str, Any], key: str, check: str) -> Any:
    if key not in block:
        raise ConfigError(f"'verify.{check}.{key}' is required")
    return block[key]


# ----------------------------------------------------------------------
# Exact combinatorics
# ----------------------------------------------------------------------

def check_shells(block: Dict[str, Any], config: Dict[str, Any]) -> CheckResult:
    """#shell(n, k) <= 2^((k+1)n) and the partial tail sums stay below 2^(n+1)"""
    reports = []
    passed = True
    k_max = int(block.get("k_max", 6))
    for n in block.get("dimensions", [1, 2, 3]):
        for k in range(1, k_max + 1):
            count, bound = shell_count(n, k), shell_bound(n, k)
            passed &= count <= bound
            reports.append(BoundReport(f"shell-{n}-{k}", _exact(count), float(bound), {"n": n, "k": k}))
        total = tail_sum(n, k_max)
        passed &= total <= 2 ** (n + 1)
        reports.append(BoundReport(f"tail-{n}-{k_max}", _exact(total), float(2 ** (n + 1)),
                                   {"n": n, "K": k_max, "exact": str(total)}))
    return CheckResult("shells", passed, reports)


def check_sequences(block: Dict[str, Any], config: Dict[str, Any]) -> CheckResult:
    """rho_k < 1/2 from the computed N on, and a'_k = rho_k a_k exactly"""
    n, d, l = int(block.get("n", 2)), int(block.get("d", 1)), int(block.get("l", 2))
    a = DecreasingSequence.from_config(_block(block, "sequence", "sequences"))
    k_max = int(block.get("k_max", 40))
    rho = rho_sequence(a, n, d, l)
    derived = derived_sequence(a, n, d, l)
    half = Fraction(1, 2)

    reports = []
    passed = True
    for k in range(rho.N, k_max + 1):
        term = rho.rho.term(k)
        below = term < half
        identity = derived.term(k) == term * a.term(k)
        passed &= below and identity
        reports.append(BoundReport(f"rho-{k}", _exact(float(term)), 0.5, {"k": k, "identity": identity}))
    return CheckResult("sequences", passed, reports, {"N": rho.N, "derived": derived.to_dict()})


# ----------------------------------------------------------------------
# Sublevel lemma on monomials
# ----------------------------------------------------------------------

def check_ctau(block: Dict[str, Any], config: Dict[str, Any]) -> CheckResult:
    """
    g(x) = x^l on [0, 1]: the grid volume matches eps^(1/l) within its error
    and stays below the lemma bound with the certified constant.
    """
    region = Hypercube((0.0,), (1.0,))
    eps_grid = [float(parse_rational(e)) for e in _block(block, "eps", "ctau")]
    cells = int(block.get("cells", 1 << 16))

    reports = []
    constants = {}
    for l in block.get("orders", [1, 2, 3]):
        g = ScalarPolynomial.from_expression(f"x1**{l}", 1)
        bounds = derivative_bounds(g, region, l)
        C = km_constant(1, l, bounds.m, bounds.M)
        constants[l] = {"C": C, "m": bounds.m, "M": bounds.M}
        checked = ctau_check(g, region, C, 1.0 / l, eps_grid, GRID, cells)
        for index, report in enumerate(checked):
            reports.append(BoundReport(f"ctau-{l}-{index}", report.lhs, report.rhs, report.constants))
        for index, (eps, report) in enumerate(zip(eps_grid, checked)):
            lhs = report.lhs
            oracle = eps ** (1.0 / l)
            reports.append(BoundReport(f"ctau-oracle-{l}-{index}", _exact(abs(lhs.value - oracle)),
                                       lhs.error + 1e-12, {"oracle": oracle}))
    return CheckResult("ctau", all(r.satisfied for r in reports), reports, {"constants": constants})


# ----------------------------------------------------------------------
# Band preimages of the worked map
# ----------------------------------------------------------------------

def check_km(block: Dict[str, Any], config: Dict[str, Any]) -> CheckResult:
    """
    Band preimage volumes around sigma-witnesses of f(0): the constant is
    calibrated on the low shells and validated on the high ones.
    """
    f = PolynomialMap.from_config(_block(block, "map", "km"), _bits(config))
    r = float(parse_rational(block.get("r", "1/10")))
    A = float(parse_rational(block.get("A", "1000")))
    width = parse_rational(block.get("width_factor", "2"))
    safety = float(parse_rational(block.get("safety", "2")))
    k_cal = int(block.get("k_calibration", 4))
    cells = int(block.get("cells", 1 << 16))

    center = TargetVector(f.value_at_origin())
    profile = sigma_profile(center, int(block.get("k_max", 8)), workers=config.get("threads", 1), **_engine(config))

    skipped, calibration, validation, seen = [], [], [], set()
    for entry in profile.entries:
        if entry.value == 0 or entry.witness in seen:
            continue
        seen.add(entry.witness)
        a = float(width * entry.value)
        holds, reason = km_side_conditions(f, entry.witness, a, r, A)
        if not holds:
            skipped.append(BoundReport(f"km-skip-{entry.k}", None, math.nan,
                                       {"i": list(entry.witness), "a": a}, SKIPPED, reason))
            continue
        (calibration if entry.k <= k_cal else validation).append((entry.witness, a))

    if not calibration or not validation:
        raise ConfigError("km check needs instances on both sides of k_calibration",
                          {"calibration": len(calibration), "validation": len(validation)})

    def measure(instance):
        i, a = instance
        return band_preimage_volume(f, Band(i, 0, Fraction(a)), r, GRID, cells)

    def form(instance):
        i, a = instance
        return km_rhs_form(f, i, a, r)

    result = calibrated_check(measure, form, calibration, validation, safety, label="km")
    reports = result.calibration + result.validation + skipped
    return CheckResult("km", result.passed, reports, {"C": result.constant, "A": A, "r": r})


def check_slope(block: Dict[str, Any], config: Dict[str, Any]) -> CheckResult:
    """Log-log slope of the band preimage volume against the halfwidth"""
    f = PolynomialMap.from_config(_block(block, "map", "slope"), _bits(config))
    i = tuple(int(c) for c in _block(block, "i", "slope"))
    r = float(parse_rational(block.get("r", "1/2")))
    widths = [parse_rational(a) for a in _block(block, "a", "slope")]
    tolerance = float(parse_rational(block.get("tolerance", "1/10")))
    cells = int(block.get("cells", 1 << 16))

    volumes = [band_preimage_volume(f, Band(i, 0, a), r, GRID, cells) for a in widths]
    fit = loglog_fit([float(a) for a in widths], [v.value for v in volumes])
    expected = 1.0 / (f.d * f.l)
    report = BoundReport("slope", _exact(abs(fit.slope - expected), method=FIT), tolerance,
                         {"slope": fit.slope, "expected": expected, "r_value": fit.r_value})
    return CheckResult("slope", report.satisfied, [report],
                       {"volumes": [v.to_dict() for v in volumes]})


# ----------------------------------------------------------------------
# Small-divisor lemma on sampled triples
# ----------------------------------------------------------------------

def sample_lemma_instances(samples: int, dimensions: List[int], max_coordinate: int, seed: int):
    """(alpha, i, a) with |(alpha, i)| <= a <= ||i||, a > 0, reproducible from seed"""
    rng = np.random.Generator(np.random.Philox(key=seed))
    instances = []
    while len(instances) < samples:
        n = int(dimensions[len(instances) % len(dimensions)])
        dens = rng.integers(1, 51, size=n)
        alpha = TargetVector(tuple(Fraction(int(rng.integers(0, q)), int(q)) for q in dens))
        i = tuple(int(x) for x in rng.integers(-max_coordinate, max_coordinate + 1, size=n))
        if norm_sq(i) == 0:
            continue
        dot = abs(alpha.dot(i))
        floor_norm = math.isqrt(norm_sq(i))
        if dot > floor_norm:
            continue
        a = dot + Fraction(int(rng.integers(1, 17)), 16) * (floor_norm - dot)
        if a <= 0:
            continue
        instances.append((alpha, i, a))
    return instances


def check_lemma(block: Dict[str, Any], config: Dict[str, Any]) -> CheckResult:
    """delta(g_t [alpha]) <= epsilon at the lemma's (epsilon, t), certified"""
    instances = sample_lemma_instances(
        int(block.get("samples", 20)),
        list(block.get("n", [2, 3])),
        int(block.get("max_coordinate", 6)),
        int(config.get("seed", 0)),
    )
    reports = []
    statuses = {"holds": 0, "tight": 0, "violated": 0}
    for index, (alpha, i, a) in enumerate(instances):
        check = lemma_check(alpha, i, a, _delta_budget(config))
        statuses[check.status] += 1
        lo, hi = check.delta.interval
        reports.append(BoundReport(
            f"lemma-{index}",
            _exact(check.delta.value, (hi - lo) + 1e-12 * max(check.epsilon, 1.0)),
            check.epsilon,
            {"alpha": [str(c) for c in alpha.coordinates], "i": list(i), "a": str(a),
             "t": check.t, "status": check.status},
        ))
    return CheckResult("lemma", statuses["violated"] == 0, reports, {"statuses": statuses})


# ----------------------------------------------------------------------
# Growth of h_t(x) Gamma
# ----------------------------------------------------------------------

def check_growth(block: Dict[str, Any], config: Dict[str, Any]) -> CheckResult:
    """The fitted growth exponent of ||h_t(x) Gamma|| - ||h_t(0) Gamma|| stays at most l"""
    f = PolynomialMap.from_config(_block(block, "map", "growth"), _bits(config))
    rows = [[parse_rational(x) for x in row] for row in _block(block, "gamma", "growth")]
    gamma = DiscreteSubgroup.from_rational_rows(rows)
    t = float(parse_rational(block.get("t", "0")))
    radii = [float(parse_rational(r)) for r in _block(block, "radii", "growth")]
    tolerance = float(parse_rational(block.get("tolerance", "1/5")))

    fit = growth_exponent_fit(f, gamma, t, radii, int(block.get("samples", 2048)), int(config.get("seed", 0)))
    report = BoundReport("growth", _exact(fit.slope, method=FIT), f.l + tolerance,
                         {"A": fit.constant, "l": f.l, "r_value": fit.r_value})
    return CheckResult("growth", report.satisfied, [report], {"exponent": fit.slope, "A": fit.constant})


# ----------------------------------------------------------------------
# Short vectors of the flowed map
# ----------------------------------------------------------------------

def check_flow_volume(block: Dict[str, Any], config: Dict[str, Any]) -> CheckResult:
    """
    Vol{x in B(0,r) : delta(g_t [f(x)]) <= eps} against (eps / r^l)^(1/(dl)) r^d,
    constant fitted on the first eps values and checked on the rest.
    """
    f = PolynomialMap.from_config(_block(block, "map", "flow_volume"), _bits(config))
    t = float(parse_rational(block.get("t", "1")))
    r = float(parse_rational(block.get("r", "1/10")))
    eps_grid = [float(parse_rational(e)) for e in _block(block, "eps", "flow_volume")]
    samples = int(block.get("samples", 1000))
    split = int(block.get("calibration", len(eps_grid) // 2))
    safety = float(parse_rational(block.get("safety", "2")))
    seed = int(config.get("seed", 0))

    def measure(eps: float) -> VolumeEstimate:
        return flow_volume_check(f, t, eps, r, 1.0, samples, seed, node_budget=_delta_budget(config)).lhs

    def form(eps: float) -> float:
        return (eps / r ** f.l) ** (1.0 / (f.d * f.l)) * r ** f.d

    result = calibrated_check(measure, form, eps_grid[:split], eps_grid[split:], safety, label="flow")
    return CheckResult("flow_volume", result.passed, result.calibration + result.validation,
                       {"C": result.constant, "t": t, "r": r})


CHECKS: Dict[str, Callable[[Dict[str, Any], Dict[str, Any]], CheckResult]] = {
    "shells": check_shells,
    "sequences": check_sequences,
    "ctau": check_ctau,
    "km": check_km,
    "slope": check_slope,
    "lemma": check_lemma,
    "growth": check_growth,
    "flow_volume": check_flow_volume,
}


def run_checks(config: Dict[str, Any]) -> List[CheckResult]:
    block = config.get("verify", {})
    results = []
    for name in block.get("checks", []):
        print(f"  - Checking {name}...")
        result = CHECKS[name](block.get(name, {}), config)
        logger.info("Verification check finished", {"check": name, "passed": result.passed,
                                                     "instances": len(result.reports)})
        print(f"    {'passed' if result.passed else 'FAILED'} ({len(result.reports)} instances)")
        results.append(result)
    return results
