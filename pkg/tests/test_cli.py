"""Tests for the command-line interface."""

import json

import pytest
from typer.testing import CliRunner

from rough_resonance import __version__, config
from rough_resonance.cli import (
    EXIT_CONFIG,
    EXIT_GEOMETRY,
    EXIT_NUMERICAL,
    EXIT_OTHER,
    EXIT_ZEROFIND,
    app,
    exit_code,
)
from rough_resonance.config import Config, ConfigError
from rough_resonance.fem import FemError
from rough_resonance.geometry import GeometryError
from rough_resonance.mesh import MeshQualityError
from rough_resonance.specfun import BranchCutError
from rough_resonance.zerofind import ZeroFindError

from .helpers import K_EXACT

runner = CliRunner()


def last_json(output: str) -> dict:
    for line in reversed(output.splitlines()):
        if line.startswith("{"):
            return json.loads(line)
    raise AssertionError(f"no JSON line in output: {output!r}")


@pytest.fixture(autouse=True)
def user_defaults(monkeypatch):
    """Isolate the tests from the user's configuration file."""
    monkeypatch.setattr(config, "_config", Config())


@pytest.fixture
def config_file(disk_config_text, tmp_path):
    path = tmp_path / "disk.toml"
    path.write_text(disk_config_text)
    return path


class TestExitCodes:
    """Tests for the error to exit status mapping."""

    def test_mapping(self):
        """Test one representative per error family."""
        assert exit_code(ConfigError("bad")) == EXIT_CONFIG
        assert exit_code(GeometryError("bad")) == EXIT_GEOMETRY
        assert exit_code(MeshQualityError("bad")) == EXIT_GEOMETRY
        assert exit_code(FemError("bad")) == EXIT_NUMERICAL
        assert exit_code(BranchCutError(-1 + 0j)) == EXIT_NUMERICAL
        assert exit_code(ZeroFindError("bad")) == EXIT_ZEROFIND
        assert exit_code(RuntimeError("bad")) == EXIT_OTHER


class TestCli:
    """Tests for the CLI commands."""

    def test_version(self):
        """Test --version."""
        result = runner.invoke(app, ["--version"])
        assert result.exit_code == 0
        assert __version__ in result.stdout

    def test_hankel_zero_json(self):
        """Test the Hankel zero helper."""
        result = runner.invoke(app, ["hankel-zero", "--order", "1", "--guess=-0.4-0.6j", "--json"])
        assert result.exit_code == 0
        data = last_json(result.stdout)
        assert data["success"] is True
        assert abs(complex(*data["zero"]) - K_EXACT / 2) < 1e-8

    def test_hankel_zero_bad_guess(self):
        """Test that an unparsable guess is a configuration error."""
        result = runner.invoke(app, ["hankel-zero", "--guess", "abc", "--json"])
        assert result.exit_code == EXIT_CONFIG
        assert last_json(result.stdout)["stage"] == "hankel-zero"

    def test_hankel_zero_on_cut(self):
        """Test that a guess on the branch cut is a numerical error."""
        result = runner.invoke(app, ["hankel-zero", "--guess=-1+0j", "--json"])
        assert result.exit_code == EXIT_NUMERICAL

    def test_config_validate(self, config_file):
        """Test validation with warnings."""
        result = runner.invoke(app, ["config", "validate", "--config", str(config_file), "--json"])
        assert result.exit_code == 0
        data = last_json(result.stdout)
        assert data["success"] is True
        assert any("margin" in warning for warning in data["warnings"])

    def test_config_show(self, config_file):
        """Test that show prints canonical YAML."""
        result = runner.invoke(app, ["config", "show", "-c", str(config_file)])
        assert result.exit_code == 0
        assert "h_target: 0.2" in result.stdout

    def test_config_error_exit(self, tmp_path):
        """Test that an invalid configuration exits with status 2."""
        path = tmp_path / "bad.toml"
        path.write_text("[task]\nrect = [-1.0, 1.0, -1.0, 0.5]\n")
        result = runner.invoke(app, ["mesh", "--config", str(path), "--json"])
        assert result.exit_code == EXIT_CONFIG
        data = last_json(result.stdout)
        assert data == {
            "success": False,
            "stage": "config",
            "error": "task.rect: search rectangle must lie in the lower half plane",
        }

    def test_missing_config(self, tmp_path):
        """Test a missing configuration file."""
        result = runner.invoke(app, ["find", "-c", str(tmp_path / "absent.toml")])
        assert result.exit_code == EXIT_CONFIG

    def test_mesh(self, config_file, tmp_path):
        """Test the mesh command with an explicit output directory."""
        out = tmp_path / "mesh-out"
        result = runner.invoke(app, ["mesh", "-c", str(config_file), "-o", str(out), "--json"])
        assert result.exit_code == 0
        data = last_json(result.stdout)
        assert data["success"] is True
        assert data["command"] == "mesh"
        assert (out / "mesh.txt").exists()

    def test_find(self, config_file, tmp_path):
        """Test the find command end to end."""
        result = runner.invoke(app, ["find", "-c", str(config_file), "--no-cache", "-t", "2"])
        assert result.exit_code == 0
        assert "find completed" in result.stdout
        assert (tmp_path / "results" / "resonances.json").exists()

    def test_sweep_on_disk_fails(self, config_file):
        """Test that a stage error reports its stage and exit status."""
        result = runner.invoke(app, ["sweep", "-c", str(config_file), "--json"])
        assert result.exit_code == EXIT_CONFIG
        assert last_json(result.stdout)["stage"] == "sweep"

    def test_pixelate(self, config_file, tmp_path):
        """Test the pixelation helper."""
        out = tmp_path / "pix"
        result = runner.invoke(
            app, ["pixelate", "-c", str(config_file), "-n", "16", "-o", str(out), "--json"]
        )
        assert result.exit_code == 0
        data = last_json(result.stdout)
        assert data["components"] == 1
        assert data["boundary_hausdorff"] <= 2.0 / 16
        assert (out / "pixels_n16.pgm").exists()
