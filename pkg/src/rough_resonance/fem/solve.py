"""Shifted Helmholtz solves and the lowest Neumann-Dirichlet eigenpairs."""

import threading
import time
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy import sparse
from scipy.sparse.linalg import ArpackNoConvergence, eigsh, splu

from rough_resonance.fem.assembly import FemError, FemSystem
from rough_resonance.logging import get_logger

logger = get_logger("fem")

DENSE_EIGEN_LIMIT = 3000
EIGEN_SHIFT = -1.0

_factor_lock = threading.Lock()


class FactorizationError(FemError):
    """Raised when the shifted system cannot be factorized."""

    def __init__(self, k0: complex, detail: str) -> None:
        self.k0 = k0
        super().__init__(f"Factorization of K - k0^2 M failed at k0 = {k0}: {detail}")


class EigenSolverError(FemError):
    """Raised when the eigensolver does not converge."""

    def __init__(self, message: str, residual: float | None = None) -> None:
        self.residual = residual
        suffix = f" (residual {residual:.3e})" if residual is not None else ""
        super().__init__(f"{message}{suffix}")


@dataclass(frozen=True, eq=False)
class ShiftedFactorization:
    """Sparse LU of K - k0^2 M, reusable across right-hand sides."""

    k0: complex
    lu: object

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return np.asarray(self.lu.solve(np.asarray(rhs, dtype=complex)))


def factorize(sys: FemSystem, k0: complex) -> ShiftedFactorization:
    """
    Factorize K - k0^2 M once per (system, k0).

    Raises:
        FactorizationError: If the matrix is singular.
    """
    k0 = complex(k0)
    with _factor_lock:
        cached = sys._factors.get(k0)
        if cached is not None:
            return cached
        start = time.perf_counter()
        A = (sys.K - (k0**2) * sys.M).astype(complex).tocsc()
        try:
            lu = splu(A)
        except RuntimeError as e:
            raise FactorizationError(k0, str(e)) from e
        factor = ShiftedFactorization(k0=k0, lu=lu)
        sys._factors[k0] = factor
        logger.debug(f"factorized d_n={sys.d_n} at k0={k0} ({time.perf_counter() - start:.2f}s)")
        return factor


def solve_helmholtz(sys: FemSystem, k0: complex, alpha: int) -> np.ndarray:
    """
    Solve (K - k0^2 M) u = b_alpha on the free vertices.

    Raises:
        FemError: If k0 is not in the lower half plane or alpha is out of range.
        FactorizationError: If the factorization fails.
    """
    if complex(k0).imag >= 0:
        raise FemError(f"k0 = {k0} must lie in the lower half plane")
    return factorize(sys, k0).solve(sys.load(alpha))


def solve_all(sys: FemSystem, k0: complex) -> np.ndarray:
    """Solutions for every mode, one column per alpha = -N..N."""
    if complex(k0).imag >= 0:
        raise FemError(f"k0 = {k0} must lie in the lower half plane")
    return factorize(sys, k0).solve(sys.B)


@dataclass(frozen=True, eq=False)
class EigenPack:
    """
    Lowest eigenpairs of K w = mu M w with their interface traces.

    traces[m, alpha + N] = (interpolated e_alpha, w_m) on the interface.
    """

    mu: np.ndarray
    vectors: np.ndarray
    traces: np.ndarray

    @property
    def J(self) -> int:
        return len(self.mu)


def _fix_phase(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry of every eigenvector positive."""
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def eig_lowest(sys: FemSystem, J: int) -> EigenPack:
    """
    Compute the J lowest eigenpairs with M-normalized eigenvectors.

    Small systems use a dense symmetric-definite solve. Larger ones use
    shift-invert Lanczos at a negative shift, which keeps the shifted matrix
    definite even without Dirichlet vertices.

    Raises:
        FemError: If J is outside 1..d_n.
        EigenSolverError: If Lanczos does not converge.
    """
    d_n = sys.d_n
    if J < 1 or J > d_n:
        raise FemError(f"Eigenpair count J={J} outside 1..{d_n}")

    start = time.perf_counter()
    if d_n <= DENSE_EIGEN_LIMIT or J >= d_n - 1:
        mu, W = scipy.linalg.eigh(
            sys.K.toarray(), sys.M.toarray(), subset_by_index=[0, J - 1]
        )
    else:
        try:
            mu, W = eigsh(sys.K, k=J, M=sys.M, sigma=EIGEN_SHIFT, which="LM")
        except ArpackNoConvergence as e:
            raise EigenSolverError(
                f"Lanczos found {len(e.eigenvalues)} of {J} eigenpairs"
            ) from e

    order = np.argsort(mu)
    mu = np.asarray(mu[order], dtype=float)
    W = np.asarray(W[:, order], dtype=float)

    norms = np.sqrt(np.einsum("ij,ij->j", W, sys.M @ W))
    W = _fix_phase(W / norms)
    # Round-off can push the constant Neumann mode slightly below zero
    scale = max(1.0, float(np.max(np.abs(mu))))
    mu = np.where((mu < 0) & (mu > -1e-9 * scale), 0.0, mu)

    residual = np.linalg.norm(sys.K @ W - (sys.M @ W) * mu, axis=0)
    bound = 1e-8 * (1.0 + np.abs(mu)) * np.linalg.norm(W, axis=0)
    if np.any(residual > bound * 1e3):
        worst = int(np.argmax(residual / bound))
        raise EigenSolverError(
            f"Eigenpair {worst} failed the residual check", float(residual[worst])
        )

    traces = W.T @ sys.B
    logger.info(
        f"Computed {J} eigenpairs (mu_1={mu[0]:.6g}, mu_J={mu[-1]:.6g}) "
        f"d_n={d_n} ({time.perf_counter() - start:.2f}s)"
    )
    return EigenPack(mu=mu, vectors=W, traces=traces)


def neumann_constant_mode(sys: FemSystem) -> np.ndarray:
    """Constant function normalized in the M-norm."""
    ones = np.ones(sys.d_n)
    return ones / np.sqrt(ones @ (sys.M @ ones))


def is_positive_definite(matrix: sparse.spmatrix) -> bool:
    """Dense Cholesky test, intended for small matrices."""
    try:
        np.linalg.cholesky(matrix.toarray())
    except np.linalg.LinAlgError:
        return False
    return True
