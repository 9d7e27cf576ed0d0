"""Tests for Hankel functions, normalizations and Hankel zeros."""

import cmath
import math

import numpy as np
import pytest
from scipy import special

from rough_resonance.specfun import (
    BranchCutError,
    ConvergenceError,
    HankelOverflowError,
    SpecialFunctionError,
    a_norm,
    diag_operators,
    hankel1,
    hankel_row,
    hankel_zero,
    log_a_norm,
    neumann_disk_eigenvalues,
)

from .helpers import K_EXACT


class TestHankelRow:
    """Tests for hankel_row and hankel1."""

    @pytest.mark.parametrize("z", [0.7 - 0.3j, 2.5 - 1.0j, -1.2 - 0.8j, 10.0 - 0.1j])
    def test_matches_scipy(self, z):
        """Test the recurrence against scipy for moderate orders."""
        row = hankel_row(12, z)
        for nu in range(13):
            expected = special.hankel1(nu, z)
            assert row.values[nu] == pytest.approx(expected, rel=1e-9)
            assert row.derivatives[nu] == pytest.approx(special.h1vp(nu, z), rel=1e-8)

    def test_hankel1_single(self):
        """Test the single-order helper."""
        value, slope = hankel1(3, 1.5 - 0.5j)
        assert value == pytest.approx(special.hankel1(3, 1.5 - 0.5j), rel=1e-10)
        assert slope == pytest.approx(special.h1vp(3, 1.5 - 0.5j), rel=1e-9)

    @pytest.mark.parametrize("z", [0.7 - 0.3j, 2.5 - 1.0j, -1.2 - 0.8j])
    def test_wronskian(self, z):
        """Test H1_(nu+1) H2_nu - H1_nu H2_(nu+1) = -4i / (pi z) along the recurrence."""
        first = hankel_row(20, z).values
        second = np.conj(hankel_row(20, np.conj(z)).values)
        expected = -4j / (math.pi * z)
        for nu in range(20):
            cross = first[nu + 1] * second[nu] - first[nu] * second[nu + 1]
            scale = max(1.0, abs(first[nu + 1] * second[nu]))
            assert abs(cross - expected) <= 1e-9 * scale

    @pytest.mark.parametrize(("nu_max", "z"), [(150, 40.0 - 2.0j), (60, 2.5 - 1.0j)])
    def test_high_order_matches_scipy(self, nu_max, z):
        """Test the forward recurrence against scipy up to high order."""
        row = hankel_row(nu_max, z)
        for nu in range(0, nu_max + 1, 10):
            assert row.values[nu] == pytest.approx(special.hankel1(nu, z), rel=1e-8)
        assert row.error.max() < 1e-8

    def test_branch_cut(self):
        """Test that the negative real axis is rejected."""
        with pytest.raises(BranchCutError):
            hankel_row(2, -1.0 + 0j)
        with pytest.raises(BranchCutError):
            hankel_row(2, 0j)

    def test_overflow_names_order(self):
        """Test that overflow reports the failing order."""
        with pytest.raises(HankelOverflowError) as info:
            hankel_row(200, 0.01 - 0.01j)
        assert info.value.order < 200

    def test_order_cap(self):
        """Test the order cap."""
        with pytest.raises(SpecialFunctionError):
            hankel_row(500, 1.0 - 1.0j)


class TestNormalization:
    """Tests for A_nu and the diagonal operators."""

    def test_a_zero(self):
        """Test that A_0 is fixed to -i."""
        assert a_norm(0, 1.0 - 1.0j, 1.0) == pytest.approx(-1j)

    def test_log_a_norm_consistent(self):
        """Test that exp(log A) = A."""
        value = log_a_norm(5, 0.3 - 0.2j, 1.0)
        assert cmath.exp(value) == pytest.approx(a_norm(5, 0.3 - 0.2j, 1.0))

    def test_normalized_hankel_tends_to_one(self):
        """Test that H_nu(kX) / A_nu(k) approaches 1 for large nu."""
        ops = diag_operators(60, 1.0 - 0.5j, 1.0)
        assert abs(ops.n1[-1] - 1.0) < 0.01

    def test_high_modes_are_identity(self):
        """Test that 1/2 (n1 + m n2) -> 1 for the harmonic NtD value m = X / nu."""
        k = 0.8 - 0.6j
        N = 80
        ops = diag_operators(N, k, 1.0)
        assert abs(0.5 * (ops.n1[-1] + ops.n2[-1] / N) - 1.0) < 0.05

    def test_n2_carries_chain_factor(self):
        """Test n2 against -k H'(kX) / A without any further factor of k."""
        k, X = 1.2 - 0.4j, 1.0
        ops = diag_operators(4, k, X)
        for nu in range(5):
            expected = -k * special.h1vp(nu, k * X) / a_norm(nu, k, X)
            assert ops.n2[4 + nu] == pytest.approx(expected, rel=1e-9)

    def test_symmetric_in_mode(self):
        """Test that entries only depend on |alpha|."""
        ops = diag_operators(5, 1.0 - 1.0j, 1.0)
        assert np.allclose(ops.n1, ops.n1[::-1])
        assert np.allclose(ops.n2, ops.n2[::-1])
        assert ops.nn[5] == 1.0 and ops.nn[0] == 5.0

    def test_upper_half_plane_rejected(self):
        """Test that k must lie in the lower half plane."""
        with pytest.raises(SpecialFunctionError, match="lower half plane"):
            diag_operators(4, 1.0 + 0.1j, 1.0)


class TestHankelZero:
    """Tests for hankel_zero."""

    def test_disk_resonance(self):
        """Test the lowest zero of H_1 against the disk reference."""
        zero = hankel_zero(1, -0.4 - 0.6j)
        assert abs(special.hankel1(1, zero)) < 1e-12
        assert abs(zero - K_EXACT / 2) <= 1e-8

    def test_order_zero_has_no_root_there(self):
        """Test that H_0 does not vanish at the disk resonance."""
        assert abs(special.hankel1(0, K_EXACT / 2)) > 0.1

    def test_independent_of_guess(self):
        """Test that nearby guesses reach the same zero."""
        a = hankel_zero(1, -0.4 - 0.6j)
        b = hankel_zero(1, -0.5 - 0.5j)
        assert abs(a - b) < 1e-10

    def test_guess_on_cut(self):
        """Test that a guess on the branch cut is rejected."""
        with pytest.raises(BranchCutError):
            hankel_zero(1, -1.0 + 0j)

    def test_guess_in_upper_half_plane(self):
        """Test that a guess with Im z > 0 is rejected."""
        with pytest.raises(SpecialFunctionError, match="lower half plane"):
            hankel_zero(1, 0.4 + 0.6j)

    def test_iterate_leaving_lower_half_plane(self):
        """Test that H_0 from the disk guess fails instead of returning an upper-plane point."""
        with pytest.raises(ConvergenceError, match="lower half plane"):
            hankel_zero(0, -0.4 - 0.6j)

    def test_iteration_cap(self):
        """Test that exhausting the iterations raises ConvergenceError."""
        with pytest.raises(ConvergenceError):
            hankel_zero(1, -3.0 - 2.0j, max_iter=1)


class TestNeumannEigenvalues:
    """Tests for the disk Neumann spectrum."""

    def test_lowest_values(self):
        """Test 0 and the doubled first nonzero eigenvalue."""
        values = neumann_disk_eigenvalues(1.0, 3)
        assert values[0] == 0.0
        assert values[1] == pytest.approx(special.jnp_zeros(1, 1)[0] ** 2)
        assert values[1] == pytest.approx(values[2])

    def test_scaling(self):
        """Test the 1/X^2 scaling."""
        assert neumann_disk_eigenvalues(2.0, 4) == pytest.approx(
            neumann_disk_eigenvalues(1.0, 4) / 4.0
        )

    def test_empty(self):
        """Test that count 0 returns nothing."""
        assert neumann_disk_eigenvalues(1.0, 0).size == 0
        assert math.isfinite(float(neumann_disk_eigenvalues(1.0, 1)[0]))
