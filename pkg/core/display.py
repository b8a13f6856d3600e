"""
Run Configuration Display

Functions for displaying the run configuration and produced artifacts.
"""

from typing import Any, Dict, List, Tuple

from core.config import VERIFY_CHECKS


def get_display_parameters(config: Dict[str, Any], command: str) -> List[Tuple[str, Any]]:
    """
    Return the parameters worth showing for a command.

    Returns:
        List of (label, value) tuples
    """
    engine = config.get("engine", {})
    block = config.get(command.replace("-", "_"), {})
    params = [
        ("Command", command),
        ("Seed", config.get("seed")),
        ("Threads", config.get("threads", 1)),
        ("Sigma engine", engine.get("sigma_engine", "auto")),
    ]
    if "alpha" in block:
        params.append(("alpha", ", ".join(str(x) for x in block["alpha"])))
    if "sequence" in block:
        spec = block["sequence"]
        if spec.get("type") == "geometric":
            params.append(("Sequence", f"{spec.get('C')} * 2^(-{spec.get('tau')} k)"))
        else:
            params.append(("Sequence", f"table of {len(spec.get('values', []))} values"))
    if "K" in block:
        params.append(("Cutoff K", block["K"]))
    if "radii" in block:
        params.append(("Radii", ", ".join(block["radii"])))
    if "samples" in block:
        params.append(("Samples per radius", block["samples"]))
    return params


def display_run_summary(config: Dict[str, Any], command: str):
    """Print the run configuration; for verify, which checks are enabled."""
    print("\n" + "=" * 60)
    print("RUN CONFIGURATION")
    print("=" * 60 + "\n")

    for label, value in get_display_parameters(config, command):
        print(f"  - {label}: {value}")

    if command == "verify":
        enabled = config.get("verify", {}).get("checks", [])
        print(f"\nChecks: {len(enabled)}/{len(VERIFY_CHECKS)} enabled\n")
        for name in VERIFY_CHECKS:
            status = "[+]" if name in enabled else "[ ]"
            print(f"  {status} {name}")

    print("\n" + "=" * 60)


def display_artifacts(artifacts: Dict[str, Any]):
    """Print the files a command wrote."""
    print("\nArtifacts:")
    for name, path in artifacts.items():
        print(f"  - {name}: {path}")
