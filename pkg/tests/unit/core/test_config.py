"""Unit tests for core.config module"""

import json
from fractions import Fraction

import pytest

from core.config import (
    OUT_DIR_ENV,
    apply_cli_overrides,
    deep_merge,
    load_config,
    parse_radii,
    t_grid_values,
    validate_run_config,
)
from shared.errors import ConfigError


@pytest.fixture(autouse=True)
def no_out_dir_env(monkeypatch):
    monkeypatch.delenv(OUT_DIR_ENV, raising=False)


class TestLoadConfig:
    """Test configuration loading"""

    def test_defaults_without_document(self):
        """Test that config.json next to arith_density.py is loaded"""
        config = load_config()
        assert config["schema_version"] == 1
        assert config["_config_path"].endswith("config.json")
        assert set(config) >= {"sigma", "member", "density", "flow", "verify", "plot_bands"}

    def test_run_document_merged_over_defaults(self, tmp_path):
        """Test that a run document overrides only what it names"""
        run = tmp_path / "run.json"
        run.write_text(json.dumps({"seed": 7, "sigma": {"K": 5}}), encoding="utf-8")

        config = load_config(str(run))

        assert config["seed"] == 7
        assert config["sigma"]["K"] == 5
        assert config["sigma"]["alpha"] == ["1", "1/2"]
        assert config["_config_path"] == str(run)

    def test_local_overrides(self, tmp_path):
        """Test config.local.json next to the run document"""
        run = tmp_path / "run.json"
        run.write_text(json.dumps({"seed": 7}), encoding="utf-8")
        (tmp_path / "config.local.json").write_text(json.dumps({"threads": 3}), encoding="utf-8")

        config = load_config(str(run))

        assert (config["seed"], config["threads"]) == (7, 3)
        assert config["_local_config_path"] == str(tmp_path / "config.local.json")

    def test_out_dir_env(self, tmp_path, monkeypatch):
        """Test that ARITH_OUT_DIR replaces output_directory"""
        monkeypatch.setenv(OUT_DIR_ENV, str(tmp_path / "elsewhere"))
        assert load_config()["output_directory"] == str(tmp_path / "elsewhere")

    def test_missing_file(self, tmp_path):
        """Test that a missing run document is a config error"""
        with pytest.raises(ConfigError, match="not found"):
            load_config(str(tmp_path / "absent.json"))

    def test_invalid_json(self, tmp_path):
        """Test that malformed JSON is a config error"""
        run = tmp_path / "run.json"
        run.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigError, match="Invalid JSON"):
            load_config(str(run))

    def test_document_must_be_object(self, tmp_path):
        """Test that a JSON list is rejected"""
        run = tmp_path / "run.json"
        run.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(str(run))


class TestDeepMerge:
    """Test deep_merge and command-line overrides"""

    def test_nested_merge(self):
        """Test that nested keys merge and the base is untouched"""
        base = {"engine": {"sigma_engine": "auto", "snap_bits": 128}, "seed": 1}
        merged = deep_merge(base, {"engine": {"snap_bits": 256}})
        assert merged == {"engine": {"sigma_engine": "auto", "snap_bits": 256}, "seed": 1}
        assert base["engine"]["snap_bits"] == 128

    def test_non_dict_replaces(self):
        """Test that a scalar override replaces a block"""
        assert deep_merge({"a": {"b": 1}}, {"a": 2}) == {"a": 2}

    def test_cli_overrides(self, sample_config):
        """Test that flags win and unset flags leave the config alone"""
        config = apply_cli_overrides(sample_config, out="out", seed=9, threads=2)
        assert (config["output_directory"], config["seed"], config["threads"]) == ("out", 9, 2)
        assert apply_cli_overrides(sample_config) == sample_config
        assert sample_config["seed"] == 1234


class TestValidateRunConfig:
    """Test schema validation of run documents"""

    @pytest.mark.parametrize("command", ["sigma", "member", "density", "flow", "verify", "plot_bands"])
    def test_sample_config_is_valid(self, sample_config, command):
        """Test that every sample block passes"""
        assert validate_run_config(sample_config, command) is sample_config[command]

    def test_unknown_command(self, sample_config):
        """Test that commands are checked"""
        with pytest.raises(ConfigError, match="Unknown command"):
            validate_run_config(sample_config, "factor")

    def test_schema_version(self, sample_config):
        """Test that only schema_version 1 is accepted"""
        sample_config["schema_version"] = 2
        with pytest.raises(ConfigError, match="schema_version"):
            validate_run_config(sample_config, "sigma")

    def test_seed_required_for_sampling(self, sample_config):
        """Test that density needs a seed but sigma does not"""
        sample_config["seed"] = None
        validate_run_config(sample_config, "sigma")
        with pytest.raises(ConfigError, match="seed"):
            validate_run_config(sample_config, "density")

    @pytest.mark.parametrize("threads", [0, -1, "4", True])
    def test_threads(self, sample_config, threads):
        """Test that threads must be a positive integer"""
        sample_config["threads"] = threads
        with pytest.raises(ConfigError):
            validate_run_config(sample_config, "sigma")

    def test_unknown_engine(self, sample_config):
        """Test the sigma engine names"""
        sample_config["engine"]["sigma_engine"] = "lll"
        with pytest.raises(ConfigError, match="engine"):
            validate_run_config(sample_config, "sigma")

    def test_float_coordinates_rejected(self, sample_config):
        """Test that target coordinates must be exact"""
        sample_config["sigma"]["alpha"] = [1, 0.5]
        with pytest.raises(ConfigError, match="exact"):
            validate_run_config(sample_config, "sigma")

    def test_missing_block(self, sample_config):
        """Test that the command block must exist"""
        del sample_config["member"]
        with pytest.raises(ConfigError, match="member"):
            validate_run_config(sample_config, "member")

    def test_missing_key(self, sample_config):
        """Test that required keys are named in the error"""
        del sample_config["member"]["sequence"]
        with pytest.raises(ConfigError, match="member.sequence"):
            validate_run_config(sample_config, "member")

    def test_bad_sequence_type(self, sample_config):
        """Test the sequence kinds"""
        sample_config["member"]["sequence"] = {"type": "harmonic"}
        with pytest.raises(ConfigError):
            validate_run_config(sample_config, "member")

    def test_increasing_radii(self, sample_config):
        """Test that density radii must decrease"""
        sample_config["density"]["radii"] = ["1/100", "1/10"]
        with pytest.raises(ConfigError, match="strictly decreasing"):
            validate_run_config(sample_config, "density")

    def test_sample_floor(self, sample_config):
        """Test the Monte-Carlo sample floor"""
        sample_config["density"]["samples"] = 999
        with pytest.raises(ConfigError, match="samples"):
            validate_run_config(sample_config, "density")

    def test_unknown_norm(self, sample_config):
        """Test the flow norms"""
        sample_config["flow"]["norm"] = "manhattan"
        with pytest.raises(ConfigError, match="norm"):
            validate_run_config(sample_config, "flow")

    def test_unknown_check(self, sample_config):
        """Test that verify names known checks only"""
        sample_config["verify"]["checks"] = ["shells", "riemann"]
        with pytest.raises(ConfigError, match="riemann"):
            validate_run_config(sample_config, "verify")

    def test_plot_radius(self, sample_config):
        """Test that the band picture radius is positive"""
        sample_config["plot_bands"]["r"] = "0"
        with pytest.raises(ConfigError, match="positive"):
            validate_run_config(sample_config, "plot_bands")


class TestGridsAndRadii:
    """Test the small parsers shared by commands"""

    def test_radii(self):
        """Test exact radii"""
        assert parse_radii(["1/10", "1/100"]) == [Fraction(1, 10), Fraction(1, 100)]

    @pytest.mark.parametrize("radii", [[], ["0"], ["1/10", "1/10"]])
    def test_bad_radii(self, radii):
        """Test empty, zero and repeated radii"""
        with pytest.raises(ConfigError):
            parse_radii(radii)

    def test_even_grid(self):
        """Test start/stop/steps"""
        assert t_grid_values({"start": "0", "stop": "1", "steps": 3}) == [0.0, 0.5, 1.0]

    def test_explicit_grid(self):
        """Test a list of times"""
        assert t_grid_values(["0", "1/4", "2"]) == [0.0, 0.25, 2.0]

    def test_bad_grid(self):
        """Test that a grid needs two steps"""
        with pytest.raises(ConfigError):
            t_grid_values({"stop": "1", "steps": 1})
