"""
Command Orchestrator

Maps each subcommand onto the library objects and writes its artifacts:
  sigma       - approximation profile CSV, witness JSON, decay fit
  member      - class membership verdict JSON
  density     - density curve CSV, curve SVG, band picture SVG (plane only)
  flow        - shortest-vector trajectory CSV and small-divisor lemma CSV
  verify      - report bundle JSON and bound-report CSV
  plot-bands  - band picture SVG around a target vector
"""

from pathlib import Path
from typing import Any, Callable, Dict, List

from core.config import parse_radii, t_grid_values
from core.verification import run_checks
from modules.classes.bands import candidate_band_set
from modules.classes.membership import membership
from modules.classes.sequences import DecreasingSequence, rho_sequence
from modules.lattice.flow import flow_trajectory, lemma_check
from modules.lattice.shortest import DEFAULT_DELTA_BUDGET
from modules.lattice.sigma import decay_exponent, sigma_profile, write_profile_csv
from modules.lattice.target import TargetVector
from modules.maps.polynomial import PolynomialMap
from modules.measure.bounds import write_bound_reports
from modules.measure.density import band_picture, density_curve
from shared.errors import BoundViolated, ConfigError, DegenerateFit, PreconditionFailed
from shared.logger import get_logger
from shared.rational_utils import format_float, format_rational, parse_rational
from shared.report_writer import plot_band_picture, plot_density_curve, write_csv_report, write_json_report

logger = get_logger()

TRAJECTORY_COLUMNS = ["t", "delta", "delta_lo", "delta_hi", "certified", "best_witness_bound", "witness"]
LEMMA_COLUMNS = ["k", "i", "a", "epsilon", "t", "delta", "status"]

Artifacts = Dict[str, Path]


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


def _threads(config: Dict[str, Any]) -> int:
    return int(config.get("threads", 1))


def _alpha(block: Dict[str, Any], config: Dict[str, Any]) -> TargetVector:
    alpha = TargetVector.from_spec(block["alpha"], _bits(config))
    print(f"  - alpha = {[format_float(float(c)) for c in alpha.coordinates]} (snap radius {alpha.snap_radius:.3g})")
    return alpha


def _witness_text(witness) -> str:
    return ";".join(str(x) for x in witness)


# ========================================
# sigma
# ========================================
def run_sigma(config: Dict[str, Any], output_dir: Path) -> Artifacts:
    block = config["sigma"]
    print("\n[Step 1/2] Approximation profile")
    alpha = _alpha(block, config)
    profile = sigma_profile(alpha, int(block["K"]), workers=_threads(config), **_engine(config))
    for entry in profile.entries:
        print(f"  - k={entry.k}: sigma = {format_rational(entry.value)} witness {list(entry.witness)}")

    print("\n[Step 2/2] Writing profile")
    csv_path = write_profile_csv(profile, output_dir / "sigma_profile.csv")
    try:
        fit = decay_exponent(profile, int(block.get("fit_k_min", 1)))
        decay = {"exponent": fit.exponent, "intercept": fit.intercept, "r_value": fit.r_value, "points": fit.points}
        print(f"  - Decay exponent: {fit.exponent:.4f}")
    except DegenerateFit as e:
        decay = {"skipped": e.message}
        print(f"  - Decay exponent skipped: {e.message}")
    json_path = write_json_report(output_dir / "sigma_witnesses.json", "sigma_witnesses", {
        "alpha": alpha.to_dict(),
        "entries": [e.to_dict() for e in profile.entries],
        "decay": decay,
    })
    print(f"  - Created: {csv_path}")
    return {"profile": csv_path, "witnesses": json_path}


# ========================================
# member
# ========================================
def run_member(config: Dict[str, Any], output_dir: Path) -> Artifacts:
    block = config["member"]
    print("\n[Step 1/1] Class membership")
    alpha = _alpha(block, config)
    a = DecreasingSequence.from_config(block["sequence"])
    verdict = membership(alpha, a, int(block["K"]), workers=_threads(config), **_engine(config))
    certified = verdict.certify(alpha, a) if not verdict.in_class else None
    if verdict.in_class:
        print(f"  - In class up to K={verdict.cutoff}")
    else:
        print(f"  - Violated at k={verdict.k} by witness {list(verdict.witness)}")

    path = write_json_report(output_dir / "member_verdict.json", "member_verdict", {
        "alpha": alpha.to_dict(),
        "sequence": a.to_dict(),
        "verdict": verdict.to_dict(),
        "witness_certified": certified,
    })
    print(f"  - Created: {path}")
    return {"verdict": path}


# ========================================
# density
# ========================================
def _derived(block: Dict[str, Any]):
    spec = block.get("derived")
    return DecreasingSequence.from_config(spec) if spec is not None else None


def run_density(config: Dict[str, Any], output_dir: Path) -> Artifacts:
    block = config["density"]
    f = PolynomialMap.from_config(block["map"], _bits(config))
    a = DecreasingSequence.from_config(block["sequence"])
    radii = parse_radii(block["radii"], "density.radii")
    K = int(block["K"])

    print("\n[Step 1/2] Density curve")
    print(f"  - Map R^{f.d} -> R^{f.n}, l={f.l}, {len(radii)} radii, K={K}")
    curve = density_curve(
        f, a, f.n, f.d, f.l, radii, K,
        samples=int(block.get("samples", 10 ** 6)),
        seed=int(config["seed"]),
        workers=_threads(config),
        derived=_derived(block),
        tail_constant=float(parse_rational(block.get("tail_constant", "1"))),
        check_preconditions=bool(block.get("check_preconditions", True)),
    )
    for point in curve.points:
        print(f"  - r={point.r:.3g}: density >= {point.density_lb:.6f} ({point.bands_considered} bands, {point.source}"
              f"{'' if point.certified else ', 95% confidence'})")

    print("\n[Step 2/2] Writing curve")
    artifacts = {"curve": curve.write_csv(output_dir / "density_curve.csv")}
    if block.get("plot", True):
        artifacts["plot"] = plot_density_curve(curve.radii, curve.densities,
                                               [p.err for p in curve.points], output_dir / "density_curve.svg")
        if f.n == 2:
            r = float(radii[0])
            center, reach, bands = band_picture(f, a, f.n, f.d, f.l, r, K, _derived(block))
            artifacts["bands"] = plot_band_picture(center, reach, bands, output_dir / "density_bands.svg",
                                                   title=f"r = {r:.3g}")
    for path in artifacts.values():
        print(f"  - Created: {path}")
    return artifacts


# ========================================
# flow
# ========================================
def run_flow(config: Dict[str, Any], output_dir: Path) -> Artifacts:
    block = config["flow"]
    print("\n[Step 1/3] Profile witnesses")
    alpha = _alpha(block, config)
    profile = sigma_profile(alpha, int(block.get("K", 0)), workers=_threads(config), **_engine(config))
    witnesses: List = []
    for entry in profile.entries:
        if entry.witness not in witnesses:
            witnesses.append(entry.witness)
    print(f"  - {len(witnesses)} distinct witnesses")

    print("\n[Step 2/3] Trajectory")
    ts = t_grid_values(block["t_grid"])
    trajectory = flow_trajectory(alpha, ts, witnesses, block.get("norm", "euclidean"), _delta_budget(config))
    rows = []
    for point in trajectory:
        best = min(point.witness_bounds) if point.witness_bounds else None
        rows.append([
            format_float(point.t),
            format_float(point.delta.value),
            format_float(point.delta.interval[0]),
            format_float(point.delta.interval[1]),
            str(point.delta.certified).lower(),
            format_float(best) if best is not None else "",
            _witness_text(point.delta.witness),
        ])
    trajectory_path = write_csv_report(output_dir / "flow_trajectory.csv", "flow_trajectory",
                                       TRAJECTORY_COLUMNS, rows)
    print(f"  - {len(trajectory)} times, {sum(p.delta.certified for p in trajectory)} certified")

    print("\n[Step 3/3] Small-divisor lemma at the witnesses")
    lemma_rows = []
    for entry in profile.entries:
        if entry.value == 0:
            lemma_rows.append([entry.k, _witness_text(entry.witness), "0", "", "", "", "skipped"])
            continue
        try:
            check = lemma_check(alpha, entry.witness, entry.value, _delta_budget(config))
        except PreconditionFailed as e:
            logger.debug("Lemma precondition fails", {"k": entry.k, "reason": e.message})
            lemma_rows.append([entry.k, _witness_text(entry.witness), format_rational(entry.value),
                               "", "", "", "skipped"])
            continue
        lemma_rows.append([
            entry.k,
            _witness_text(entry.witness),
            format_rational(entry.value),
            format_float(check.epsilon),
            format_float(check.t),
            format_float(check.delta.value),
            check.status,
        ])
        print(f"  - k={entry.k}: delta {check.delta.value:.6g} vs epsilon {check.epsilon:.6g} ({check.status})")
    lemma_path = write_csv_report(output_dir / "lemma_checks.csv", "lemma_checks", LEMMA_COLUMNS, lemma_rows)
    print(f"  - Created: {trajectory_path}")
    print(f"  - Created: {lemma_path}")
    return {"trajectory": trajectory_path, "lemma": lemma_path}


# ========================================
# verify
# ========================================
def run_verify(config: Dict[str, Any], output_dir: Path) -> Artifacts:
    print("\n[Step 1/2] Running checks")
    results = run_checks(config)

    print("\n[Step 2/2] Writing reports")
    reports = [r for result in results for r in result.reports]
    csv_path = write_bound_reports(reports, output_dir / "bound_reports.csv")
    failed = [result.name for result in results if not result.passed]
    json_path = write_json_report(output_dir / "verify_report.json", "verify_report", {
        "seed": config.get("seed"),
        "summary": {"checks": len(results), "passed": len(results) - len(failed), "failed": failed},
        "checks": {result.name: result.to_dict() for result in results},
    })
    print(f"  - Created: {csv_path}")
    print(f"  - Created: {json_path}")
    if failed:
        raise BoundViolated(f"{len(failed)} check(s) failed: {', '.join(failed)}",
                            {"failed": failed, "report": str(json_path)})
    return {"reports": csv_path, "bundle": json_path}


# ========================================
# plot-bands
# ========================================
def run_plot_bands(config: Dict[str, Any], output_dir: Path) -> Artifacts:
    block = config["plot_bands"]
    print("\n[Step 1/1] Band picture")
    alpha = _alpha(block, config)
    if alpha.n != 2 or int(block.get("n", 2)) != 2:
        raise ConfigError("Band pictures are drawn in the plane only (n = 2)", {"n": alpha.n})
    a = DecreasingSequence.from_config(block["sequence"])
    derived = _derived(block)
    if derived is None:
        band_a, band_rho = a, rho_sequence(a, 2, int(block.get("d", 1)), int(block.get("l", 1))).rho
    else:
        band_a, band_rho = derived, DecreasingSequence.geometric(1, 0)
    r = parse_rational(block["r"])
    bands = candidate_band_set(band_a, band_rho, r, int(block["K"]), center=alpha)
    print(f"  - {len(bands)} candidate bands meet B(alpha, {float(r):.3g})")
    path = plot_band_picture(
        alpha.float_shadow,
        float(r),
        [(tuple(int(c) for c in b.i), float(b.halfwidth)) for b in bands.to_bands()],
        output_dir / "bands.svg",
        title=f"K = {block['K']}, r = {format_rational(r)}",
    )
    print(f"  - Created: {path}")
    return {"bands": path}


COMMANDS: Dict[str, Callable[[Dict[str, Any], Path], Artifacts]] = {
    "sigma": run_sigma,
    "member": run_member,
    "density": run_density,
    "flow": run_flow,
    "verify": run_verify,
    "plot_bands": run_plot_bands,
}


def run_command(command: str, config: Dict[str, Any], output_dir: Path) -> Artifacts:
    """
    Execute one subcommand.

    Args:
        command: key of COMMANDS ("plot-bands" is accepted for "plot_bands")
        config: validated configuration dict
        output_dir: directory for the artifacts

    Returns:
        Artifact name -> written path
    """
    command = command.replace("-", "_")
    if command not in COMMANDS:
        raise ConfigError(f"Unknown command '{command}'", {"known": sorted(COMMANDS)})
    output_dir.mkdir(parents=True, exist_ok=True)
    logger.info("Command started", {"command": command, "output_dir": str(output_dir)})
    artifacts = COMMANDS[command](config, output_dir)
    logger.info("Command finished", {"command": command, "artifacts": len(artifacts)})
    print(f"\n[+] {command} complete!")
    return artifacts
