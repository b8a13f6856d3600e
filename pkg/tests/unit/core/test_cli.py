"""Test the command-line front-end and its exit codes"""

import json

import pytest

import arith_density
from core import verification
from core.config import OUT_DIR_ENV
from core.verification import CheckResult
from shared.errors import EXIT_BOUND_VIOLATED, EXIT_CONFIG, EXIT_OK


@pytest.fixture(autouse=True)
def no_out_dir_env(monkeypatch):
    monkeypatch.delenv(OUT_DIR_ENV, raising=False)


def write_document(tmp_path, document):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(document), encoding="utf-8")
    return path


class TestMain:
    """Test arith_density.main"""

    def test_sigma_success(self, temp_config_file, tmp_path, capsys):
        """Test a successful run and its reports"""
        out = tmp_path / "out"
        code = arith_density.main(["sigma", "--config", str(temp_config_file), "--out", str(out)])

        assert code == EXIT_OK
        assert (out / "sigma_profile.csv").exists()
        assert "Reports saved to" in capsys.readouterr().out

    def test_config_error(self, tmp_path, sample_config, capsys):
        """Test exit code 4 with a machine-readable error"""
        sample_config["sigma"]["alpha"] = [1, 0.5]
        out = tmp_path / "out"
        code = arith_density.main(["sigma", "--config", str(write_document(tmp_path, sample_config)),
                                   "--out", str(out)])

        assert code == EXIT_CONFIG
        error = json.loads((out / "error.json").read_text(encoding="utf-8"))
        assert error["type"] == "ConfigError"
        assert error["exit_code"] == EXIT_CONFIG
        assert '"ConfigError"' in capsys.readouterr().out

    def test_missing_document(self, tmp_path):
        """Test that a missing run document is a config error"""
        code = arith_density.main(["member", "--config", str(tmp_path / "absent.json"),
                                   "--out", str(tmp_path / "out")])
        assert code == EXIT_CONFIG
        assert (tmp_path / "out" / "error.json").exists()

    def test_bound_violated(self, temp_config_file, tmp_path, monkeypatch):
        """Test exit code 2 when a verification check fails"""
        monkeypatch.setitem(verification.CHECKS, "shells", lambda block, config: CheckResult("shells", False))
        out = tmp_path / "out"
        code = arith_density.main(["verify", "--config", str(temp_config_file), "--out", str(out)])

        assert code == EXIT_BOUND_VIOLATED
        assert json.loads((out / "error.json").read_text(encoding="utf-8"))["details"]["failed"] == ["shells"]

    def test_seed_and_threads_flags(self, temp_config_file, tmp_path):
        """Test that flags are validated like config values"""
        code = arith_density.main(["sigma", "--config", str(temp_config_file), "--threads", "0",
                                   "--out", str(tmp_path / "out")])
        assert code == EXIT_CONFIG

    def test_unknown_subcommand(self):
        """Test that argparse rejects unknown subcommands"""
        with pytest.raises(SystemExit):
            arith_density.main(["factor"])
