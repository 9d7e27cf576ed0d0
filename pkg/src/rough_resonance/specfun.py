"""
Hankel functions of the first kind for complex arguments.

Orders 0 and 1 are seeded from scipy.special.hankel1 (principal branch).
Higher orders follow the forward recurrence, which is stable for H^(1)
because it dominates as the order grows. The recurrence is carried as a
mantissa with a separate log-scale so that ratios H_nu / A_nu stay
finite long after H_nu itself would overflow.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from rough_resonance.logging import get_logger

logger = get_logger("specfun")

MAX_ORDER = 200
MAX_ARGUMENT = 1.0e3
OVERFLOW_LIMIT = 1.0e300
_RESCALE_AT = 1.0e100
_SEED_ERROR = 1.0e-15


# =============================================================================
# Errors
# =============================================================================


class SpecialFunctionError(Exception):
    """Base error for special-function evaluation."""


class BranchCutError(SpecialFunctionError):
    """Raised for arguments on the branch cut (-inf, 0]."""

    def __init__(self, z: complex) -> None:
        self.z = z
        super().__init__(f"Argument {z} lies on the branch cut (-inf, 0]")


class HankelOverflowError(SpecialFunctionError):
    """Raised when a Hankel value exceeds the representable range."""

    def __init__(self, order: int, z: complex) -> None:
        self.order = order
        self.z = z
        super().__init__(f"H^(1)_{order}({z}) exceeds {OVERFLOW_LIMIT:g}")


class ConvergenceError(SpecialFunctionError):
    """Raised when an iterative root finder does not converge."""

    def __init__(self, message: str, iterations: int, last: complex) -> None:
        self.iterations = iterations
        self.last = last
        super().__init__(f"{message} after {iterations} iterations (last iterate {last})")


# =============================================================================
# Hankel rows
# =============================================================================


@dataclass(frozen=True)
class HankelRow:
    """H^(1)_nu(z) and its derivative for nu = 0..nu_max."""

    z: complex
    values: np.ndarray
    derivatives: np.ndarray
    error: np.ndarray

    @property
    def nu_max(self) -> int:
        return len(self.values) - 1


def _check_argument(z: complex, nu_max: int) -> None:
    if z == 0 or (z.imag == 0 and z.real <= 0):
        raise BranchCutError(z)
    if abs(z) > MAX_ARGUMENT:
        raise SpecialFunctionError(f"|z| = {abs(z):.6g} exceeds {MAX_ARGUMENT:g}")
    if nu_max < 0 or nu_max > MAX_ORDER:
        raise SpecialFunctionError(f"Order {nu_max} outside 0..{MAX_ORDER}")


def scaled_hankel(nu_max: int, z: complex) -> tuple[np.ndarray, np.ndarray]:
    """
    Forward recurrence in scaled form.

    Returns:
        (mantissa, log_scale) with H^(1)_nu(z) = mantissa[nu] * exp(log_scale[nu]).
    """
    z = complex(z)
    _check_argument(z, nu_max)
    mant = np.zeros(nu_max + 2, dtype=complex)
    logs = np.zeros(nu_max + 2, dtype=float)
    mant[0] = special.hankel1(0, z)
    mant[1] = special.hankel1(1, z)
    if not (np.isfinite(mant[0]) and np.isfinite(mant[1])):
        raise SpecialFunctionError(f"Hankel seeds are not finite at z = {z}")

    # Both neighbours are kept on a common scale while stepping
    prev, cur, scale = mant[0], mant[1], 0.0
    for nu in range(1, nu_max + 1):
        nxt = (2.0 * nu / z) * cur - prev
        prev, cur = cur, nxt
        big = abs(cur)
        if big > _RESCALE_AT:
            prev /= big
            cur /= big
            scale += math.log(big)
        mant[nu + 1] = cur
        logs[nu + 1] = scale
    return mant[: nu_max + 1], logs[: nu_max + 1]


def hankel_row(nu_max: int, z: complex) -> HankelRow:
    """
    Evaluate H^(1)_nu(z) and derivatives for nu = 0..nu_max.

    Derivatives use (H_nu)' = H_{nu-1} - (nu/z) H_nu with H_{-1} = -H_1.

    Args:
        nu_max: Highest order (at most 200).
        z: Complex argument off (-inf, 0], |z| <= 1e3.

    Returns:
        HankelRow with values, derivatives and a per-order recurrence residual.

    Raises:
        BranchCutError: If z lies on the cut.
        HankelOverflowError: If a value exceeds 1e300, naming the order.
    """
    z = complex(z)
    mant, logs = scaled_hankel(max(nu_max, 1), z)
    values = np.empty(nu_max + 1, dtype=complex)
    for nu in range(nu_max + 1):
        magnitude = math.log(abs(mant[nu])) + logs[nu] if mant[nu] != 0 else -math.inf
        if magnitude > math.log(OVERFLOW_LIMIT):
            raise HankelOverflowError(nu, z)
        values[nu] = mant[nu] * math.exp(logs[nu])

    lower = np.empty(nu_max + 1, dtype=complex)
    lower[0] = -mant[1] * math.exp(logs[1])
    lower[1:] = values[:-1]
    derivatives = lower - (np.arange(nu_max + 1) / z) * values

    error = np.full(nu_max + 1, _SEED_ERROR)
    for nu in range(nu_max - 1):
        back = (2.0 * (nu + 1) / z) * values[nu + 1] - values[nu + 2]
        error[nu] = max(_SEED_ERROR, abs(back - values[nu]) / abs(values[nu]))
    return HankelRow(z=z, values=values, derivatives=derivatives, error=error)


def hankel1(order: int, z: complex) -> tuple[complex, complex]:
    """H^(1)_order(z) and its derivative."""
    row = hankel_row(order, z)
    return complex(row.values[order]), complex(row.derivatives[order])


# =============================================================================
# Normalization and diagonal operators
# =============================================================================


def log_a_norm(nu: int, k: complex, X: float) -> complex:
    """Principal logarithm of A_nu(k) = -i sqrt(2/(pi nu)) (e k X / (2 nu))^(-nu)."""
    if k == 0:
        raise SpecialFunctionError("A_nu is undefined at k = 0")
    if nu == 0:
        return cmath.log(-1j)
    return (
        cmath.log(-1j)
        + 0.5 * math.log(2.0 / (math.pi * nu))
        - nu * cmath.log(math.e * complex(k) * X / (2.0 * nu))
    )


def a_norm(nu: int, k: complex, X: float) -> complex:
    """Normalization A_nu of the Hankel growth; A_0 is fixed to -i."""
    return cmath.exp(log_a_norm(nu, k, X))


@dataclass(frozen=True)
class DiagOperators:
    """
    Diagonals of N1(k), N2(k) and the order weight, indexed by alpha + N.

    n1[alpha] = H_|alpha|(kX) / A_|alpha|
    n2[alpha] = -k H'_|alpha|(kX) / A_|alpha|   (outward normal of the exterior)
    nn[alpha] = max(|alpha|, 1)

    n2 already carries the factor -k of the chain rule; callers apply it as is.
    For |alpha| large, n2[alpha] approaches |alpha| / X times n1[alpha].
    """

    N: int
    k: complex
    X: float
    n1: np.ndarray
    n2: np.ndarray
    nn: np.ndarray

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1)


def diag_operators(N: int, k: complex, X: float) -> DiagOperators:
    """
    Build the diagonal operators at k for modes -N..N.

    Raises:
        SpecialFunctionError: If k is not in the open lower half plane or N < 0.
    """
    k = complex(k)
    if N < 0:
        raise SpecialFunctionError(f"Truncation N must be >= 0, got {N}")
    if k.imag >= 0:
        raise SpecialFunctionError(f"k = {k} is not in the lower half plane")

    z = k * X
    mant, logs = scaled_hankel(max(N, 1) + 1, z)
    n1_half = np.empty(N + 1, dtype=complex)
    n2_half = np.empty(N + 1, dtype=complex)
    for nu in range(N + 1):
        log_a = log_a_norm(nu, k, X)
        ratio = mant[nu] * cmath.exp(logs[nu] - log_a)
        if nu == 0:
            below = -mant[1] * cmath.exp(logs[1] - log_a)
        else:
            below = mant[nu - 1] * cmath.exp(logs[nu - 1] - log_a)
        n1_half[nu] = ratio
        n2_half[nu] = -k * (below - (nu / z) * ratio)

    if not (np.all(np.isfinite(n1_half)) and np.all(np.isfinite(n2_half))):
        raise HankelOverflowError(int(np.argmax(~np.isfinite(n1_half))), z)

    orders = np.abs(np.arange(-N, N + 1))
    return DiagOperators(
        N=N,
        k=k,
        X=float(X),
        n1=n1_half[orders],
        n2=n2_half[orders],
        nn=np.maximum(orders, 1).astype(float),
    )


# =============================================================================
# Root finding
# =============================================================================


def hankel_zero(
    m: int,
    guess: complex,
    tol: float = 1.0e-12,
    max_iter: int = 100,
) -> complex:
    """
    Newton iteration for a zero of H^(1)_m in the lower half plane.

    Steps that would cross the branch cut are halved up to 20 times. The
    zeros below the cut are the resonances of a sound-soft disk: for radius a
    the lowest one of order m gives k = z / a, and the disk of radius 1/2 has
    its lowest resonance at the order-1 zero near -0.42-0.58i.

    Args:
        m: Order.
        guess: Starting point in the open lower half plane.
        tol: Stop once |H^(1)_m(z)| < tol.
        max_iter: Iteration cap.

    Returns:
        The zero.

    Raises:
        BranchCutError: If the guess lies on the cut.
        SpecialFunctionError: If the guess lies in the upper half plane.
        ConvergenceError: If an iterate leaves the lower half plane, on
            divergence, or when the final residual exceeds tol.
    """
    z = complex(guess)
    if z == 0 or (z.imag == 0 and z.real <= 0):
        raise BranchCutError(z)
    if z.imag >= 0:
        raise SpecialFunctionError(f"Guess {z} is not in the lower half plane")
    value, slope = hankel1(m, z)
    for iteration in range(1, max_iter + 1):
        if abs(value) < tol:
            # One more step polishes the root to machine precision
            if slope != 0:
                polished = z - value / slope
                if polished.imag < 0 and _off_cut(polished):
                    polished_value = hankel1(m, polished)[0]
                    if abs(polished_value) <= abs(value):
                        z, value = polished, polished_value
            if abs(value) > tol:
                raise ConvergenceError(f"Residual {abs(value):.3e} above {tol:g}", iteration, z)
            return z
        if slope == 0:
            raise ConvergenceError("Vanishing derivative in Newton iteration", iteration, z)
        step = value / slope
        for _ in range(20):
            if _off_cut(z - step):
                break
            step /= 2.0
        else:
            raise ConvergenceError("Newton iterate kept crossing the branch cut", iteration, z)
        z = z - step
        if z.imag >= 0:
            raise ConvergenceError("Newton iterate left the lower half plane", iteration, z)
        value, slope = hankel1(m, z)
        logger.debug(f"hankel_zero m={m} iter={iteration} z={z} |H|={abs(value):.3e}")
    raise ConvergenceError("Newton iteration for Hankel zero diverged", max_iter, z)


def _off_cut(z: complex) -> bool:
    return not (z.imag == 0 and z.real <= 0) and z != 0 and abs(z) <= MAX_ARGUMENT


def neumann_disk_eigenvalues(X: float, count: int) -> np.ndarray:
    """
    Lowest Neumann Laplacian eigenvalues of the disk of radius X.

    They are 0 and (j'_{p,s}/X)^2, where j'_{p,s} are the zeros of J'_p.
    Orders p >= 1 appear twice (cos and sin modes).
    """
    if count < 1:
        return np.zeros(0)
    values = [0.0]
    depth = count + 2
    for p in range(depth):
        roots = special.jnp_zeros(p, depth)
        mult = 1 if p == 0 else 2
        for root in roots:
            values.extend([(root / X) ** 2] * mult)
    return np.sort(np.asarray(values))[:count]
