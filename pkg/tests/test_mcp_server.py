"""Tests for the MCP tool functions."""

import pytest

from rough_resonance.mcp_server import (
    certify_hankel_zeros,
    find_resonances,
    hankel_zero,
    obstacle_membership,
)

from .helpers import K_EXACT


class TestTools:
    """Tests calling the tools as plain functions."""

    def test_obstacle_membership(self):
        """Test disk membership for an inside and an outside point."""
        result = obstacle_membership([[0.0, 0.0], [0.9, 0.0]], kind="disk", radius=0.5)
        assert result == {"inside": [True, False]}

    def test_hankel_zero(self):
        """Test the zero of H_1 near the default guess."""
        result = hankel_zero()
        assert complex(*result["zero"]) == pytest.approx(K_EXACT / 2, abs=1e-8)

    def test_certify_hankel_zeros(self):
        """Test that the disk resonance is covered by one cluster."""
        result = certify_hankel_zeros(n=3, rect=[-1.0, -0.7, -1.3, -1.0])
        assert len(result["clusters"]) == 1

    def test_find_resonances_stage_error(self, tmp_path):
        """Test that a failing stage is reported instead of raised."""
        path = tmp_path / "run.toml"
        path.write_text('[obstacle]\nkind = "pixel-oracle"\nbitmap = "absent.pgm"\n')
        result = find_resonances(str(path), str(tmp_path / "out"))
        assert result["success"] is False
        assert result["stage"] == "obstacle"
