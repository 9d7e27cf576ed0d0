"""Tests for writers, the model cache and the parallel map."""

import json
import math
import threading

import numpy as np
import pytest

from rough_resonance.utils import (
    ModelCache,
    cache_dir,
    format_csv_float,
    model_cache_key,
    parallel_map,
    to_jsonable,
    write_csv,
    write_json,
)
from rough_resonance.utils.cache import CACHE_ENV
from rough_resonance.utils.writers import csv_text, dumps_json


class TestWriters:
    """Tests for JSON and CSV output."""

    def test_to_jsonable(self):
        """Test complex, numpy and non-finite conversion."""
        data = {
            "k": 1 - 2j,
            "mu": np.array([1.0, math.inf]),
            "n": np.int64(3),
            "ok": np.bool_(True),
        }
        assert to_jsonable(data) == {"k": [1.0, -2.0], "mu": [1.0, None], "n": 3, "ok": True}

    def test_dumps_sorted(self):
        """Test sorted keys and a trailing newline."""
        text = dumps_json({"b": 1, "a": 0.1})
        assert text.endswith("\n")
        assert list(json.loads(text)) == ["a", "b"]
        assert json.loads(text)["a"] == 0.1

    def test_write_json(self, tmp_path):
        """Test that parent directories are created."""
        path = write_json({"k": -1j}, tmp_path / "a" / "b.json")
        assert json.loads(path.read_text()) == {"k": [0.0, -1.0]}

    def test_csv_digits(self):
        """Test 12 significant digits in CSV cells."""
        assert format_csv_float(math.pi) == "3.14159265359"
        assert format_csv_float(math.nan) == "nan"
        assert csv_text(["x", "n"], [(0.1, 2)]) == "x,n\n0.1,2\n"

    def test_write_csv(self, tmp_path):
        """Test the CSV file."""
        path = write_csv(["re", "im"], [(1.0, -2.0)], tmp_path / "out.csv")
        assert path.read_text().splitlines() == ["re,im", "1,-2"]


class TestModelCache:
    """Tests for the on-disk model cache."""

    def test_key_depends_on_parameters(self, disk_mesh):
        """Test that the key changes with every model parameter."""
        base = model_cache_key(disk_mesh, -1 - 1j, 6, 60)
        assert base == model_cache_key(disk_mesh, complex(-1.0, -1.0), 6, 60)
        assert base != model_cache_key(disk_mesh, -1 - 1j, 7, 60)
        assert base != model_cache_key(disk_mesh, -1 - 1j, 6, 59)
        assert base != model_cache_key(disk_mesh, -1 - 0.9j, 6, 60)

    def test_put_and_get(self, disk_model, tmp_path):
        """Test a cache round trip."""
        cache = ModelCache(tmp_path)
        assert cache.get("abc") is None
        cache.put("abc", disk_model)
        again = cache.get("abc")
        assert again is not None
        assert np.array_equal(again.ahat0, disk_model.ahat0)

    def test_disabled(self, disk_model, tmp_path):
        """Test that a disabled cache neither reads nor writes."""
        cache = ModelCache(tmp_path, enabled=False)
        assert cache.put("abc", disk_model) is None
        assert not (tmp_path / "models").exists()

    def test_unreadable_entry(self, tmp_path):
        """Test that a corrupt entry counts as a miss."""
        cache = ModelCache(tmp_path)
        path = cache.path_for("bad")
        path.parent.mkdir(parents=True)
        path.write_text("{")
        assert cache.get("bad") is None

    def test_cache_dir_env(self, monkeypatch, tmp_path):
        """Test the environment override and the XDG fallback."""
        monkeypatch.setenv(CACHE_ENV, str(tmp_path / "override"))
        assert cache_dir() == tmp_path / "override"
        monkeypatch.delenv(CACHE_ENV)
        monkeypatch.setenv("XDG_CACHE_HOME", str(tmp_path))
        assert cache_dir() == tmp_path / "rough-resonance"


class TestParallelMap:
    """Tests for parallel_map."""

    @pytest.mark.parametrize("threads", [1, 4])
    def test_order_preserved(self, threads):
        """Test that results keep the input order."""
        assert parallel_map(lambda x: x * x, range(20), threads) == [x * x for x in range(20)]

    def test_uses_threads(self):
        """Test that more than one worker thread runs."""
        seen: set[int] = set()
        barrier = threading.Barrier(2, timeout=5)

        def work(_: int) -> None:
            seen.add(threading.get_ident())
            barrier.wait()

        parallel_map(work, range(2), threads=2)
        assert len(seen) == 2
