"""Tests for the run stages and their artifacts."""

import json

import pytest

from rough_resonance.config import ConfigError, parse_config
from rough_resonance.geometry import ObstacleSpec
from rough_resonance.pipeline import (
    COMMANDS,
    Pipeline,
    StageError,
    disk_reference,
    resonance_record,
    unique_resonances,
    with_overrides,
)
from rough_resonance.zerofind import ResonanceResult

from .helpers import DISK, K_EXACT


def result(k: complex, converged: bool = True) -> ResonanceResult:
    return ResonanceResult(k=k, log_abs=-30.0, iterations=3, converged=converged, trail=(k,))


@pytest.fixture
def pipeline(disk_config_text, tmp_path) -> Pipeline:
    return Pipeline.create(parse_config(disk_config_text), tmp_path / "out")


class TestHelpers:
    """Tests for result post-processing."""

    def test_unique_resonances(self):
        """Test deduplication, filtering and ordering."""
        found = unique_resonances(
            [result(-0.5 - 1j), result(-1 - 1j), result(-1 - 1j + 1e-9), result(0.2 - 1j, False)]
        )
        assert [r.k for r in found] == [-1 - 1j, -0.5 - 1j]

    def test_resonance_record(self):
        """Test the record fields."""
        record = resonance_record(result(-1 - 1j))
        assert record["k"] == -1 - 1j
        assert record["seed"] == -1 - 1j
        assert record["converged"] is True
        assert record["multiplicity"] == 1
        assert "provenance" not in record

    def test_disk_reference(self):
        """Test the exact disk resonance nearest a point."""
        reference = disk_reference(DISK, -0.8 - 1.1j)
        assert reference is not None
        assert abs(reference - K_EXACT) < 1e-8
        assert disk_reference(ObstacleSpec(kind="koch", level=1), -0.8 - 1.1j) is None
        assert disk_reference(ObstacleSpec(radius=0.2, center=(0.1, 0.0)), -1 - 1j) is None

    def test_with_overrides(self, disk_config_text):
        """Test that None leaves a runtime field unchanged."""
        config = parse_config(disk_config_text)
        changed = with_overrides(config, threads=3, cache=None)
        assert changed.runtime.threads == 3
        assert changed.runtime.cache is False
        assert changed.discretization == config.discretization


class TestPipeline:
    """Tests for the command stages on the coarse disk."""

    def test_commands(self):
        """Test the command list."""
        assert COMMANDS == ("mesh", "model", "contour", "find", "certify", "converge", "sweep")

    def test_mesh(self, pipeline):
        """Test the mesh artifacts."""
        summary = pipeline.run("mesh")
        assert (pipeline.out_dir / "mesh.txt").exists()
        assert "C_theta" in (pipeline.out_dir / "mesh_quality.txt").read_text()
        assert summary["h"] <= 0.2

    def test_model(self, pipeline):
        """Test the model artifact."""
        summary = pipeline.run("model")
        assert summary["N"] == 6
        data = json.loads((pipeline.out_dir / "model.json").read_text())
        assert data["format"] == "rough-resonance-model/1"

    def test_contour(self, pipeline):
        """Test the contour CSV."""
        summary = pipeline.run("contour")
        assert summary["shape"] == [8, 8]
        lines = (pipeline.out_dir / "contour.csv").read_text().splitlines()
        assert len(lines) == 65

    def test_find(self, pipeline):
        """Test the resonance document."""
        summary = pipeline.run("find")
        data = json.loads((pipeline.out_dir / "resonances.json").read_text())
        assert summary["count"] == len(data["resonances"]) >= 1
        k = complex(*data["resonances"][0]["k"])
        assert abs(k - K_EXACT) < 0.2
        assert data["model"]["N"] == 6

    def test_cache_reuses_model(self, disk_config_text, tmp_path):
        """Test that a second run reads the cached model."""
        text = disk_config_text.replace("cache = false", f'cache_dir = "{tmp_path / "cache"}"')
        config = parse_config(text)
        first = Pipeline.create(config, tmp_path / "a")
        first.run("model")
        cached = list((tmp_path / "cache" / "models").glob("*.json"))
        assert len(cached) == 1
        second = Pipeline.create(config, tmp_path / "b")
        assert second.cache.get(cached[0].stem) is not None
        second.run("model")
        assert len(list((tmp_path / "cache" / "models").glob("*.json"))) == 1

    def test_sweep_needs_family(self, pipeline):
        """Test that a disk cannot be swept."""
        with pytest.raises(StageError) as info:
            pipeline.run("sweep")
        assert info.value.stage == "sweep"
        assert isinstance(info.value.cause, ConfigError)

    def test_unknown_command(self, pipeline):
        """Test dispatch of an unknown command."""
        with pytest.raises(StageError, match="Unknown command"):
            pipeline.run("plot")

    def test_hankel_certify(self, disk_config_text, tmp_path):
        """Test certification of the disk resonance with the Hankel function."""
        text = disk_config_text.replace(
            "[task]", '[task]\ncertify_function = "hankel"\ncertify_n = 3'
        )
        run = Pipeline.create(parse_config(text), tmp_path / "out")
        summary = run.run("certify")
        data = json.loads((tmp_path / "out" / "certified.json").read_text())
        assert summary["clusters"] == 1
        assert data["bound_provider"] == "heuristic"

    def test_reproducible_outputs(self, disk_config_text, tmp_path):
        """Test that two cache-off runs write byte-identical artifacts."""
        config = parse_config(disk_config_text)
        for name in ("a", "b"):
            run = Pipeline.create(config, tmp_path / name)
            run.run("contour")
            run.run("find")
        for artifact in ("contour.csv", "resonances.json"):
            first = (tmp_path / "a" / artifact).read_bytes()
            assert first == (tmp_path / "b" / artifact).read_bytes()

    @pytest.mark.slow
    def test_julia_q_zero_matches_disk(self, tmp_path):
        """Test that the q = 0 Julia set reproduces the disk resonance."""
        text = f"""
[obstacle]
kind = "julia"
scale = 0.5

[geometry]
pixel_n = 128

[discretization]
h_target = 0.05
N = 7
J = 100

[task]
seeds = [[-0.84, -1.15]]
q_values = [0.0]

[output]
directory = "{tmp_path / 'julia'}"

[runtime]
cache = false
"""
        Pipeline.create(parse_config(text)).run("sweep")
        data = json.loads((tmp_path / "julia" / "sweep.json").read_text())
        found = [complex(*k) for k in data["entries"][0]["resonances"]]
        assert min(abs(k - K_EXACT) for k in found) <= 1e-2

    @pytest.mark.slow
    def test_converge(self, disk_config_text, tmp_path):
        """Test the convergence study artifacts."""
        text = disk_config_text.replace("h_values = [0.2, 0.15]", "h_values = [0.1, 0.05]")
        run = Pipeline.create(parse_config(text), tmp_path / "out")
        summary = run.run("converge")
        data = json.loads((tmp_path / "out" / "converge.json").read_text())
        assert summary["levels"] == 2
        assert complex(*data["reference"]) == pytest.approx(K_EXACT)
        assert data["rows"][-1]["error"] < data["rows"][0]["error"]
        assert (tmp_path / "out" / "converge.txt").read_text().startswith("# Resonance convergence")

    @pytest.mark.slow
    def test_koch_sweep(self, tmp_path):
        """Test a Koch level sweep."""
        text = f"""
[obstacle]
kind = "koch"
scale = 0.5

[discretization]
h_target = 0.1

[task]
rect = [-1.5, -0.3, -1.5, -0.3]
resolution = [12, 12]
koch_levels = [1, 2]

[output]
directory = "{tmp_path / 'sweep'}"

[runtime]
cache = false
"""
        summary = Pipeline.create(parse_config(text)).run("sweep")
        assert summary["entries"] == 2
        data = json.loads((tmp_path / "sweep" / "sweep.json").read_text())
        assert [entry["value"] for entry in data["entries"]] == [1, 2]
