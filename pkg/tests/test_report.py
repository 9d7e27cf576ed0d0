"""Tests for the text report templates."""

import pytest

from rough_resonance.report import convergence_table, quality_report, render, sweep_table


class TestReport:
    """Tests for convergence, sweep and quality tables."""

    def test_convergence_table(self):
        """Test rows, reference and slope."""
        rows = [
            {"h": 0.1, "N": 4, "J": 100, "k": -0.8 - 1.1j, "error": 0.07},
            {"h": 0.05, "N": 6, "J": 100, "k": -0.83 - 1.15j, "error": 0.01},
        ]
        text = convergence_table("disk", rows, -0.84 - 1.15j, 2.01)
        lines = text.splitlines()
        assert lines[0] == "# Resonance convergence (disk)"
        assert lines[1] == "# reference: -0.84-1.15i"
        assert lines[2].split() == ["h", "N", "J", "gamma_h", "error"]
        assert lines[3].split() == ["0.1", "4", "100", "-0.8-1.1i", "0.07"]
        assert lines[-1] == "# log-log slope: 2.01"

    def test_convergence_without_reference(self):
        """Test that missing values print as '-'."""
        rows = [{"h": 0.1, "N": 4, "J": 50, "k": -1 - 1j, "error": None}]
        text = convergence_table("koch", rows, None, None)
        assert "# reference: -" in text
        assert text.splitlines()[-1].split()[-1] == "-"
        assert "slope" not in text

    def test_sweep_table(self):
        """Test entries with and without resonances."""
        entries = [
            {"value": 0.1, "resonances": [-1 - 1j, -2 - 0.5j]},
            {"value": 0.2, "resonances": []},
        ]
        text = sweep_table("julia", "q", entries)
        assert text.startswith("# Resonance sweep over q (julia)")
        assert "q = 0.1" in text
        assert "-1-1i" in text and "-2-0.5i" in text
        assert "(none)" in text

    def test_quality_report(self):
        """Test the quality summary."""
        text = quality_report(
            n_vertices=10, n_triangles=12, d_n=8, h=0.2, C_theta=2.5, worst_element=3
        )
        assert "C_theta       2.5" in text
        assert "free dofs     8" in text

    def test_missing_value(self):
        """Test that undefined names raise ValueError."""
        with pytest.raises(ValueError, match="Undefined report value"):
            render("{{ absent.value }}")

    def test_syntax_error(self):
        """Test that broken templates raise ValueError."""
        with pytest.raises(ValueError, match="Template syntax error"):
            render("{% for %}")
