"""
Discretization parameter heuristics.

The practical schedule ties the Fourier truncation to the mesh size through
N ~ c h^(-1/2); c is calibrated against the reference table of optimal N
values observed for the radius-1/2 disk.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np

from rough_resonance.logging import get_logger
from rough_resonance.mesh.trimesh import TriMesh
from rough_resonance.ntd.model import ModelError, SpectralModel, build_model, eval_t

logger = get_logger("ntd")

ScheduleStyle = Literal["theoretical", "practical"]
ProfileCriterion = Literal["deviation", "modulus"]

# Mesh size h -> optimal truncation N for the disk of radius 1/2, X = 1
OPTIMAL_N_TABLE: tuple[tuple[float, int], ...] = (
    (0.08, 6),
    (0.05, 7),
    (0.02, 10),
    (0.01, 13),
    (0.005, 17),
    (0.002, 28),
    (0.001, 39),
)

DEFAULT_J_CAP = 100


@dataclass(frozen=True)
class Schedule:
    """One step of a discretization schedule."""

    N: int
    h_target: float
    J: int


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r_squared: float


def fit_constant(table: Sequence[tuple[float, int]] = OPTIMAL_N_TABLE) -> float:
    """
    Least-squares c in N = c h^(-1/2), fitted as N^2 = c^2 / h through the origin.
    """
    x = np.array([1.0 / h for h, _ in table])
    y = np.array([float(n) ** 2 for _, n in table])
    s = float(x @ y) / float(x @ x)
    return math.sqrt(s)


PRACTICAL_C = fit_constant()


def linear_fit(x: Sequence[float], y: Sequence[float]) -> LinearFit:
    """Ordinary least squares y = a x + b with the coefficient of determination."""
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if xs.size < 2:
        raise ValueError("linear_fit needs at least two points")
    slope, intercept = np.polyfit(xs, ys, 1)
    residual = ys - (slope * xs + intercept)
    total = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 - float(residual @ residual) / total if total > 0 else 1.0
    return LinearFit(float(slope), float(intercept), r2)


def table_fit(table: Sequence[tuple[float, int]] = OPTIMAL_N_TABLE) -> LinearFit:
    """Fit of N^2 against 1/h."""
    return linear_fit([1.0 / h for h, _ in table], [n**2 for _, n in table])


def practical_N(h: float, c: float = PRACTICAL_C) -> int:
    if h <= 0:
        raise ValueError(f"Mesh size must be positive, got {h}")
    return max(1, round(c / math.sqrt(h)))


def param_schedule(
    n: int,
    style: ScheduleStyle = "practical",
    h: float | None = None,
    h_grid: Sequence[float] | None = None,
    d_n: int | None = None,
    J_cap: int = DEFAULT_J_CAP,
) -> Schedule:
    """
    Discretization parameters for step n of a refinement sequence.

    theoretical: N = n, h = n^-2, J = n^3, so N -> inf, h N^(5/4) -> 0 and
    J N^-2 -> inf.

    practical: h is taken from ``h`` or ``h_grid[n-1]`` (default grid: the
    reference table), N = round(c h^-1/2) and J = min(d_n, J_cap).

    Raises:
        ValueError: If n < 1 or the grid has no entry n.
    """
    if n < 1:
        raise ValueError(f"Schedule index must be >= 1, got {n}")
    if style == "theoretical":
        return Schedule(N=n, h_target=1.0 / n**2, J=n**3)
    if style != "practical":
        raise ValueError(f"Unknown schedule style: {style}")

    if h is None:
        grid = list(h_grid) if h_grid is not None else [row[0] for row in OPTIMAL_N_TABLE]
        if n > len(grid):
            raise ValueError(f"Schedule index {n} beyond the {len(grid)}-entry h grid")
        h = float(grid[n - 1])
    J = J_cap if d_n is None else min(d_n, J_cap)
    return Schedule(N=practical_N(h), h_target=float(h), J=J)


# =============================================================================
# Optimal truncation
# =============================================================================


def diagonal_profile(
    model: SpectralModel,
    k_trial: complex,
    criterion: ProfileCriterion = "deviation",
) -> np.ndarray:
    """
    Diagonal profile of T_n(k_trial) for nu = 0..N, the smaller of the +-nu entries.

    "deviation" measures |T_nu,nu - 1|, the diagonal of the compact part of
    T_n(k) = I + K_n(k), which decays with the mode until the mesh can no
    longer resolve it. "modulus" measures |T_nu,nu| itself. The truncated
    operators share their entries, so the profile of the largest model
    serves every smaller N.
    """
    diag = np.diag(eval_t(model, k_trial))
    if criterion == "deviation":
        d = np.abs(diag - 1.0)
    elif criterion == "modulus":
        d = np.abs(diag)
    else:
        raise ModelError(f"Unknown profile criterion: {criterion}")
    N = model.N
    return np.minimum(d[N:], d[N::-1])


def first_minimum(profile: np.ndarray, start: int = 1) -> int | None:
    """
    First nu >= start where the profile stops decreasing.

    The profile decreases strictly before nu, so the minimum over the
    modes from start to nu sits at the end. None when the profile keeps
    decreasing up to its last entry.
    """
    for nu in range(max(start, 0), len(profile) - 1):
        if profile[nu] <= profile[nu + 1]:
            return nu
    return None


def optimal_N_from_model(
    model: SpectralModel,
    k_trial: complex,
    criterion: ProfileCriterion = "deviation",
) -> tuple[int, bool]:
    """
    First minimum of the diagonal profile beyond the propagating modes.

    Modes with nu <= |k_trial| X oscillate rather than decay, so the scan
    starts just above them.

    Returns:
        (N, at_boundary): at_boundary is True when the profile has no
        interior minimum and N equals the model's truncation.
    """
    profile = diagonal_profile(model, k_trial, criterion)
    start = max(1, math.ceil(abs(complex(k_trial)) * model.X))
    N = first_minimum(profile, start)
    if N is None:
        return model.N, True
    return N, False


def optimal_N(
    mesh: TriMesh,
    k_trial: complex,
    N_big: int,
    J: int = DEFAULT_J_CAP,
    k0: complex = -1 - 1j,
    criterion: ProfileCriterion = "deviation",
) -> int:
    """
    Heuristic optimal truncation from the diagonal profile of a large model.

    Returns N_big with a warning when no interior minimum exists.

    Raises:
        ModelError: Propagated from model construction.
    """
    if N_big < 1:
        raise ModelError(f"N_big must be >= 1, got {N_big}")
    model = build_model(mesh, k0, N_big, min(J, mesh.d_n))
    N, at_boundary = optimal_N_from_model(model, k_trial, criterion)
    if at_boundary:
        logger.warning(f"No interior minimum of the {criterion} profile up to N_big={N_big}")
    else:
        logger.info(f"Optimal N={N} at h={mesh.h:.4g} (N_big={N_big}, {criterion})")
    return N


def tail_bound(model: SpectralModel, k: complex) -> float:
    """
    Estimate of sum_{m>J} |k^2 - k0^2| / (mu_m - Re k^2)^2.

    Eigenvalues beyond mu_J are extrapolated by Weyl's law mu_m ~ mu_J m / J,
    and the sum is replaced by its integral majorant. Returns inf when mu_J
    does not exceed Re k^2.
    """
    k2 = complex(k) ** 2
    mu_J = float(model.mu[-1])
    gap = mu_J - k2.real
    if mu_J <= 0 or gap <= 0:
        return math.inf
    slope = mu_J / model.J
    return abs(k2 - model.k0**2) / (slope * gap)
