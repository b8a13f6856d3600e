"""Configuration management for arith-density runs"""

import json
import os
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

from shared.errors import ConfigError
from shared.rational_utils import parse_rational

SCHEMA_VERSION = 1
OUT_DIR_ENV = "ARITH_OUT_DIR"

COMMANDS = ("sigma", "member", "density", "flow", "verify", "plot_bands")
# Commands that draw random samples and therefore need a seed
SEEDED_COMMANDS = ("density", "verify")
VERIFY_CHECKS = ("shells", "sequences", "ctau", "km", "slope", "lemma", "growth", "flow_volume")


def deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """
    Deep merge two dictionaries. Override values take precedence.

    Args:
        base: Base configuration dictionary
        override: Override configuration dictionary (takes precedence)

    Returns:
        Merged dictionary with override values taking precedence

    Examples:
        >>> base = {"a": 1, "b": {"c": 2, "d": 3}}
        >>> override = {"b": {"c": 99}, "e": 5}
        >>> deep_merge(base, override)
        {'a': 1, 'b': {'c': 99, 'd': 3}, 'e': 5}
    """
    result = base.copy()

    for key, value in override.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = deep_merge(result[key], value)
        else:
            result[key] = value

    return result


def default_config_path() -> Path:
    """
    config.json next to arith_density.py when running from source, otherwise
    in the current working directory.
    """
    script_dir = Path(__file__).parent.parent
    if (script_dir / "arith_density.py").exists():
        return script_dir / "config.json"
    return Path.cwd() / "config.json"


def _read_json(path: Path) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            document = json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"Config file not found: {path}", {"path": str(path)})
    except json.JSONDecodeError as e:
        raise ConfigError(f"Invalid JSON in {path}: {e}", {"path": str(path)})
    if not isinstance(document, dict):
        raise ConfigError(f"Config document {path} must be a JSON object")
    return document


def load_config(path: Optional[str] = None) -> Dict[str, Any]:
    """
    Defaults from config.json, the run document at `path` merged over them,
    then config.local.json next to the run document (or the defaults) and
    finally the ARITH_OUT_DIR override of the output directory.
    """
    defaults_path = default_config_path()
    config = _read_json(defaults_path) if defaults_path.exists() else {}
    base_dir = defaults_path.parent

    if path:
        run_path = Path(path)
        config = deep_merge(config, _read_json(run_path))
        base_dir = run_path.parent
        config["_config_path"] = str(run_path)
    else:
        if not config:
            raise ConfigError(f"config.json not found at {defaults_path}", {"path": str(defaults_path)})
        config["_config_path"] = str(defaults_path)

    local_path = base_dir / "config.local.json"
    if local_path.exists():
        config = deep_merge(config, _read_json(local_path))
        config["_local_config_path"] = str(local_path)

    env_out = os.environ.get(OUT_DIR_ENV)
    if env_out:
        config["output_directory"] = env_out

    return config


def apply_cli_overrides(
    config: Dict[str, Any],
    out: Optional[str] = None,
    seed: Optional[int] = None,
    threads: Optional[int] = None,
) -> Dict[str, Any]:
    """Command-line flags win over every document"""
    config = dict(config)
    if out:
        config["output_directory"] = out
    if seed is not None:
        config["seed"] = seed
    if threads is not None:
        config["threads"] = threads
    return config


# ----------------------------------------------------------------------
# Validation
# ----------------------------------------------------------------------

def _require(block: Dict[str, Any], key: str, command: str) -> Any:
    if key not in block or block[key] is None:
        raise ConfigError(f"'{command}.{key}' is required", {"command": command, "key": key})
    return block[key]


def _positive_int(value: Any, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError(f"'{name}' must be an integer >= {minimum}, got {value!r}")
    return value


def _rational_list(values: Any, name: str) -> List[Fraction]:
    if not isinstance(values, list) or not values:
        raise ConfigError(f"'{name}' must be a non-empty list")
    return [parse_rational(v) for v in values]


def _vector_spec(values: Any, name: str):
    if not isinstance(values, list) or not values:
        raise ConfigError(f"'{name}' must be a non-empty list of coordinates")
    for v in values:
        if isinstance(v, float):
            raise ConfigError(f"'{name}' entries must be exact (\"p/q\" strings or expressions), got {v!r}")


def _sequence_spec(spec: Any, name: str):
    if not isinstance(spec, dict) or spec.get("type") not in ("geometric", "table"):
        raise ConfigError(f"'{name}' must be a geometric or table sequence spec")
    if spec["type"] == "geometric":
        for key in ("C", "tau"):
            if key not in spec:
                raise ConfigError(f"'{name}.{key}' is required")
            parse_rational(spec[key])
    else:
        _rational_list(spec.get("values"), f"{name}.values")


def parse_radii(values: Any, name: str = "radii") -> List[Fraction]:
    radii = _rational_list(values, name)
    if any(r <= 0 for r in radii):
        raise ConfigError(f"'{name}' must be positive")
    if any(b >= a for a, b in zip(radii, radii[1:])):
        raise ConfigError(f"'{name}' must be strictly decreasing", {"radii": [str(r) for r in radii]})
    return radii


def _map_spec(spec: Any, name: str):
    if not isinstance(spec, dict):
        raise ConfigError(f"'{name}' must be a map spec object")
    for key in ("d", "components"):
        if key not in spec:
            raise ConfigError(f"'{name}.{key}' is required")


def validate_run_config(config: Dict[str, Any], command: str) -> Dict[str, Any]:
    """
    Check the document before any work starts; returns the command block.

    Raises:
        ConfigError: on the first violation found
    """
    if command not in COMMANDS:
        raise ConfigError(f"Unknown command '{command}'", {"known": list(COMMANDS)})
    version = config.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"Unsupported schema_version {version}", {"supported": SCHEMA_VERSION})

    _positive_int(config.get("threads", 1), "threads")
    if command in SEEDED_COMMANDS:
        seed = config.get("seed")
        if seed is None:
            raise ConfigError(f"'{command}' samples randomly and needs a seed")
        _positive_int(seed, "seed", minimum=0)

    engine = config.get("engine", {})
    for key in ("exhaustive_limit", "node_budget", "delta_node_budget", "snap_bits"):
        if key in engine:
            _positive_int(engine[key], f"engine.{key}")
    if engine.get("sigma_engine", "auto") not in ("auto", "exhaustive", "bnb"):
        raise ConfigError(f"Unknown sigma engine {engine.get('sigma_engine')!r}")

    block = config.get(command)
    if not isinstance(block, dict):
        raise ConfigError(f"Missing '{command}' block")

    if command == "sigma":
        _vector_spec(_require(block, "alpha", command), "sigma.alpha")
        _positive_int(_require(block, "K", command), "sigma.K", minimum=0)
    elif command == "member":
        _vector_spec(_require(block, "alpha", command), "member.alpha")
        _sequence_spec(_require(block, "sequence", command), "member.sequence")
        _positive_int(_require(block, "K", command), "member.K", minimum=0)
    elif command == "density":
        _map_spec(_require(block, "map", command), "density.map")
        _sequence_spec(_require(block, "sequence", command), "density.sequence")
        parse_radii(_require(block, "radii", command), "density.radii")
        _positive_int(_require(block, "K", command), "density.K", minimum=0)
        _positive_int(block.get("samples", 1000), "density.samples", minimum=1000)
        if block.get("derived") is not None:
            _sequence_spec(block["derived"], "density.derived")
    elif command == "flow":
        _vector_spec(_require(block, "alpha", command), "flow.alpha")
        _require(block, "t_grid", command)
        _positive_int(block.get("K", 0), "flow.K", minimum=0)
        if block.get("norm", "euclidean") not in ("euclidean", "sup"):
            raise ConfigError(f"Unknown norm {block.get('norm')!r}")
    elif command == "verify":
        checks = block.get("checks", [])
        unknown = [c for c in checks if c not in VERIFY_CHECKS]
        if unknown:
            raise ConfigError(f"Unknown verify checks {unknown}", {"known": list(VERIFY_CHECKS)})
    elif command == "plot_bands":
        _vector_spec(_require(block, "alpha", command), "plot_bands.alpha")
        _sequence_spec(_require(block, "sequence", command), "plot_bands.sequence")
        if parse_rational(_require(block, "r", command)) <= 0:
            raise ConfigError("'plot_bands.r' must be positive")
        _positive_int(_require(block, "K", command), "plot_bands.K", minimum=0)
    return block


def t_grid_values(spec: Any) -> List[float]:
    """A list of times, or {"start", "stop", "steps"} for an even grid"""
    if isinstance(spec, list):
        return [float(parse_rational(t)) for t in spec]
    if isinstance(spec, dict):
        start = float(parse_rational(spec.get("start", "0")))
        stop = float(parse_rational(_require(spec, "stop", "flow.t_grid")))
        steps = _positive_int(spec.get("steps", 2), "flow.t_grid.steps", minimum=2)
        return [start + (stop - start) * j / (steps - 1) for j in range(steps)]
    raise ConfigError(f"Invalid t_grid {spec!r}")
