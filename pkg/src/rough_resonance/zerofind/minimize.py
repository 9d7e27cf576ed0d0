"""
Local resonance search: damped Newton on g(k) = det T_n(k).

The determinant is only ever handled through its logarithm. The Newton
quotient g'/g comes from a central difference of determinant ratios
g(k +- h) / g(k) = exp(log g(k +- h) - log g(k)), which never overflows.
"""

import cmath
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from rough_resonance.logging import get_logger
from rough_resonance.mesh.trimesh import TriMesh
from rough_resonance.ntd import LogDet, SpectralModel, build_model, wrap_angle
from rough_resonance.zerofind.contour import LogDetEvaluator, det_evaluator
from rough_resonance.zerofind.rect import ZeroFindError

logger = get_logger("zerofind")

DEFAULT_STOP = 1.0e-12
MAX_ITERATIONS = 200
MAX_HALVINGS = 10
MAX_REFLECTIONS = 2
REFLECT_IM = -1.0e-6
FD_STEP = 1.0e-6
MAX_MULTIPLICITY = 4
WINDING_SAMPLES = 32
WINDING_RADIUS = 3.0
# Newton step ratio above which convergence counts as linear
LINEAR_RATIO = 0.3


@dataclass(frozen=True)
class ResonanceResult:
    """Outcome of one local search."""

    k: complex
    log_abs: float
    iterations: int
    converged: bool
    trail: tuple[complex, ...]
    multiplicity: int = 1
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def residual(self) -> float:
        """|det T_n(k)|."""
        return math.exp(self.log_abs) if self.log_abs > -math.inf else 0.0


def affine_logdet(z0: complex) -> LogDetEvaluator:
    """Evaluator of g(k) = k - z0, used to exercise the search on an exact root."""

    def evaluate(k: complex) -> LogDet:
        d = complex(k) - z0
        if d == 0:
            return LogDet(-math.inf, 0.0)
        return LogDet(math.log(abs(d)), cmath.phase(d))

    return evaluate


def log_derivative(evaluate: LogDetEvaluator, k: complex, at: LogDet) -> complex:
    """g'(k) / g(k) by a central difference of determinant ratios."""
    h = FD_STEP * (1.0 + abs(k))
    plus = evaluate(k + h)
    minus = evaluate(k - h)
    base = at.log()
    ratio_plus = cmath.exp(plus.log() - base) if not plus.is_singular else 0j
    ratio_minus = cmath.exp(minus.log() - base) if not minus.is_singular else 0j
    return (ratio_plus - ratio_minus) / (2.0 * h)


def winding_number(
    evaluate: LogDetEvaluator,
    centre: complex,
    radius: float,
    samples: int = WINDING_SAMPLES,
) -> int | None:
    """
    Zeros of g inside |k - centre| = radius counted by the change of arg g.

    Returns None when the circle passes through a zero.
    """
    phases = []
    for j in range(samples):
        value = evaluate(centre + radius * cmath.exp(2j * math.pi * j / samples))
        if value.is_singular:
            return None
        phases.append(value.arg)
    total = sum(wrap_angle(b - a) for a, b in zip(phases, phases[1:] + phases[:1], strict=True))
    return round(total / (2.0 * math.pi))


def estimate_multiplicity(evaluate: LogDetEvaluator, k: complex, newton: complex) -> int:
    """
    Multiplicity of the zero the Newton step points at.

    Near a zero of multiplicity m the plain Newton step covers 1/m of the
    distance, so a circle of radius WINDING_RADIUS |newton| around k encloses
    the zero. The radius is capped to keep the circle in the lower half plane.
    """
    radius = min(WINDING_RADIUS * abs(newton), 0.5 * abs(k.imag))
    if radius <= 0:
        return 1
    count = winding_number(evaluate, k, radius)
    if count is None:
        return 1
    return max(1, min(count, MAX_MULTIPLICITY))


def _line_search(
    evaluate: LogDetEvaluator, k: complex, current: LogDet, step: complex
) -> tuple[complex, LogDet] | None:
    """Halve the step until it stays in the lower half plane and lowers |g|."""
    for _ in range(MAX_HALVINGS + 1):
        candidate = k + step
        if candidate.imag < 0:
            value = evaluate(candidate)
            if value.log_abs < current.log_abs:
                return candidate, value
        step /= 2.0
    return None


def minimize(
    model: SpectralModel | LogDetEvaluator,
    k_init: complex,
    stop: float = DEFAULT_STOP,
    max_iter: int = MAX_ITERATIONS,
) -> ResonanceResult:
    """
    Drive |det T_n(k)| below ``stop`` starting from k_init.

    Each iteration tries a damped Newton step. If no halving of it lowers
    |g| inside the lower half plane, a descent step along -conj(g'/g) (the
    steepest descent of log|g|) is tried instead. A full Newton step landing
    on or above the real axis is reflected to Im k = -1e-6, at most twice.

    Zeros of multiplicity m make plain Newton converge linearly. When the
    step shrinks by less than LINEAR_RATIO per iteration, or would leave the
    lower half plane, m is estimated by the argument principle and the step
    is scaled by m until the estimate changes.

    Args:
        model: Spectral model, or any callable returning a LogDet.
        k_init: Starting point, Im k_init < 0.
        stop: Threshold on |g|.
        max_iter: Iteration cap.

    Returns:
        ResonanceResult; converged is False when the iteration stalls or
        runs out of iterations.

    Raises:
        ZeroFindError: If k_init is not in the lower half plane or the
            iterates keep escaping it.
    """
    k = complex(k_init)
    if k.imag >= 0:
        raise ZeroFindError(f"Starting point {k} must lie in the lower half plane")
    evaluate = det_evaluator(model) if isinstance(model, SpectralModel) else model
    log_stop = math.log(stop)

    current = evaluate(k)
    trail = [k]
    reflections = 0
    iterations = 0
    multiplicity = 1
    previous: complex | None = None
    while current.log_abs >= log_stop and iterations < max_iter:
        iterations += 1
        quotient = log_derivative(evaluate, k, current)
        if quotient == 0 or not cmath.isfinite(quotient):
            logger.debug(f"minimize: degenerate derivative at {k}")
            break

        plain = -1.0 / quotient
        slow = previous is not None and abs(multiplicity * plain) > LINEAR_RATIO * abs(previous)
        if slow or (k + multiplicity * plain).imag >= 0:
            estimate = estimate_multiplicity(evaluate, k, plain)
            if estimate != multiplicity:
                logger.debug(f"minimize: multiplicity {multiplicity} -> {estimate} at {k}")
                multiplicity = estimate
        newton = multiplicity * plain
        if (k + newton).imag >= 0:
            reflections += 1
            if reflections > MAX_REFLECTIONS:
                raise ZeroFindError(
                    f"Iterates left the lower half plane {reflections} times (last {k + newton})"
                )
            newton = complex((k + newton).real, REFLECT_IM) - k

        accepted = _line_search(evaluate, k, current, newton)
        if accepted is None and multiplicity > 1:
            multiplicity = 1
            accepted = _line_search(evaluate, k, current, plain)
        if accepted is None:
            descent = -quotient.conjugate() / abs(quotient) ** 2
            accepted = _line_search(evaluate, k, current, descent)
        if accepted is None:
            logger.debug(f"minimize: no decrease from {k} (log|g|={current.log_abs:.3f})")
            break

        previous = accepted[0] - k
        k, current = accepted
        trail.append(k)
        logger.debug(f"minimize iter={iterations} k={k} log|g|={current.log_abs:.3f}")

    converged = current.log_abs < log_stop
    logger.info(
        f"minimize from {complex(k_init)}: k={k} |g|=exp({current.log_abs:.2f}) "
        f"multiplicity={multiplicity} after {iterations} iterations"
        f"{'' if converged else ' (not converged)'}"
    )
    return ResonanceResult(
        k=k,
        log_abs=current.log_abs,
        iterations=iterations,
        converged=converged,
        trail=tuple(trail),
        multiplicity=multiplicity,
    )


# =============================================================================
# Anchored refinement
# =============================================================================


@dataclass(frozen=True, eq=False)
class RefinementLevel:
    """One mesh of a refinement sequence with its truncation parameters."""

    mesh: TriMesh
    N: int
    J: int


class RefinementError(ZeroFindError):
    """Raised when a level fails; carries the results of the completed levels."""

    def __init__(self, message: str, partial: list[ResonanceResult]) -> None:
        self.partial = partial
        super().__init__(message)


ModelBuilder = Callable[[TriMesh, complex, int, int], SpectralModel]


def anchored_refinement(
    levels: Sequence[RefinementLevel],
    k0_init: complex,
    stop: float = DEFAULT_STOP,
    builder: ModelBuilder = build_model,
) -> list[ResonanceResult]:
    """
    Follow one resonance through a refining sequence of meshes.

    Level l builds its model at k0 = the resonance found on level l-1 (k0_init
    for the first level) and starts the search there, so the corrector is
    always evaluated close to its reference point.

    Raises:
        RefinementError: If a level does not converge; the completed levels
            (and the failed one) are attached as ``partial``.
    """
    results: list[ResonanceResult] = []
    k0 = complex(k0_init)
    for index, level in enumerate(levels):
        model = builder(level.mesh, k0, level.N, min(level.J, level.mesh.d_n))
        result = minimize(model, k0, stop)
        result = replace(
            result,
            metadata={
                "level": index,
                "h": level.mesh.h,
                "N": level.N,
                "J": model.J,
                "k0": k0,
                "d_n": model.d_n,
            },
        )
        results.append(result)
        if not result.converged:
            raise RefinementError(
                f"Level {index} (h={level.mesh.h:.4g}, N={level.N}) did not converge; "
                f"|g|=exp({result.log_abs:.2f})",
                results,
            )
        logger.info(f"Level {index}: h={level.mesh.h:.4g} N={level.N} gamma={result.k}")
        k0 = result.k
    return results


def convergence_slope(h: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(h)."""
    slope, _ = np.polyfit(np.log(np.asarray(h)), np.log(np.asarray(errors)), 1)
    return float(slope)
