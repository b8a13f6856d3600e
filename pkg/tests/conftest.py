"""Pytest configuration and shared fixtures"""

import copy
import json

import pytest

from modules.classes.sequences import DecreasingSequence
from modules.lattice.target import TargetVector
from modules.maps.polynomial import PolynomialMap

WORKED_MAP_SPEC = {
    "d": 1,
    "n": 2,
    "l": 2,
    "shift": ["1", "phi"],
    "components": [[["1", 1]], [["1", 2]]],
}


@pytest.fixture
def worked_map_spec():
    """Map spec of f(x) = (1, phi) + (x, x^2)"""
    return copy.deepcopy(WORKED_MAP_SPEC)


@pytest.fixture
def worked_map():
    """f(x) = (1, phi) + (x, x^2) with phi snapped to a convergent"""
    return PolynomialMap.from_config(copy.deepcopy(WORKED_MAP_SPEC))


@pytest.fixture
def golden_vector():
    """alpha = (1, phi), badly approximable"""
    return TargetVector.from_spec(["1", "phi"])


@pytest.fixture
def half_vector():
    """alpha = (1, 1/2), hit exactly by (1, -2)"""
    return TargetVector.from_spec(["1", "1/2"])


@pytest.fixture
def worked_sequence():
    """a_k = (1/5) 2^{-k}"""
    return DecreasingSequence.from_config({"type": "geometric", "C": "1/5", "tau": "1"})


@pytest.fixture
def unit_sequence():
    """a_k = 2^{-k}"""
    return DecreasingSequence.geometric(1, 1)


@pytest.fixture
def sample_config():
    """Provide a small run configuration for every command"""
    return {
        "schema_version": 1,
        "output_directory": "results",
        "seed": 1234,
        "threads": 1,
        "engine": {
            "sigma_engine": "auto",
            "exhaustive_limit": 1000000,
            "node_budget": 1000000000,
            "delta_node_budget": 10000000,
            "snap_bits": 128,
        },
        "sigma": {"alpha": ["1", "1/2"], "K": 3, "fit_k_min": 1},
        "member": {
            "alpha": ["1", "phi"],
            "sequence": {"type": "geometric", "C": "1/5", "tau": "1"},
            "K": 6,
        },
        "density": {
            "map": copy.deepcopy(WORKED_MAP_SPEC),
            "sequence": {"type": "geometric", "C": "1/5", "tau": "1"},
            "radii": ["1/10", "1/100"],
            "K": 6,
            "samples": 4000,
            "tail_constant": "1",
            "check_preconditions": True,
            "derived": None,
            "plot": True,
        },
        "flow": {
            "alpha": ["1/2"],
            "t_grid": {"start": "0", "stop": "1", "steps": 3},
            "K": 2,
            "norm": "euclidean",
        },
        "verify": {
            "checks": ["shells", "sequences"],
            "shells": {"dimensions": [1, 2], "k_max": 3},
            "sequences": {"n": 2, "d": 1, "l": 2,
                          "sequence": {"type": "geometric", "C": "1", "tau": "1"}, "k_max": 10},
        },
        "plot_bands": {
            "alpha": ["1", "phi"],
            "sequence": {"type": "geometric", "C": "1/5", "tau": "1"},
            "n": 2,
            "d": 1,
            "l": 2,
            "derived": {"type": "geometric", "C": "1/20", "tau": "1"},
            "r": "1/4",
            "K": 3,
        },
    }


@pytest.fixture
def temp_config_file(tmp_path, sample_config):
    """Write the sample configuration as a run document"""
    config_file = tmp_path / "run.json"
    with open(config_file, 'w', encoding='utf-8') as f:
        json.dump(sample_config, f, indent=2)
    return config_file
