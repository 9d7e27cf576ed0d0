"""
Spectral model of the truncated operator family T_n(k).

One FEM factorization at the reference point k0 gives the reference NtD
matrix; the lowest eigenpairs then carry it to any k in the lower half
plane through the accelerated eigenfunction expansion.
"""

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from rough_resonance.fem import assemble, eig_lowest, solve_all
from rough_resonance.logging import get_logger
from rough_resonance.mesh.trimesh import TriMesh
from rough_resonance.specfun import diag_operators

logger = get_logger("ntd")

T_OVERFLOW_LIMIT = 1.0e300
MODEL_FORMAT = "rough-resonance-model/1"


class ModelError(Exception):
    """Base error for spectral model construction and evaluation."""


class TOverflowError(ModelError):
    """Raised when an entry of T_n(k) is not representable."""

    def __init__(self, k: complex, alpha: int, beta: int) -> None:
        self.k = k
        self.alpha = alpha
        self.beta = beta
        super().__init__(f"T_n({k}) entry ({beta}, {alpha}) exceeds {T_OVERFLOW_LIMIT:g}")


@dataclass(frozen=True, eq=False)
class SpectralModel:
    """
    Everything needed to evaluate T_n(k) without further FEM solves.

    Attributes:
        X: Interface radius.
        N: Highest Fourier mode.
        J: Number of eigenpairs in the corrector.
        k0: Reference point, Im k0 < 0.
        ahat0: (2N+1, 2N+1) matrix, ahat0[alpha+N, beta+N] = a_{alpha beta}(k0).
        mu: Ascending eigenvalues.
        traces: (J, 2N+1) interface pairings of the eigenvectors.
        d_n: FEM dimension.
        metadata: Provenance (mesh size, quality, ...).
    """

    X: float
    N: int
    J: int
    k0: complex
    ahat0: np.ndarray
    mu: np.ndarray
    traces: np.ndarray
    d_n: int
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1)


def reference_matrix(U: np.ndarray, B: np.ndarray) -> np.ndarray:
    """
    a_{alpha beta}(k0) = b_{-beta}^T u_alpha = conj(b_beta)^T u_alpha.

    Args:
        U: (d_n, 2N+1) solutions, column alpha + N.
        B: (d_n, 2N+1) loads.
    """
    return (B.conj().T @ U).T


def build_model(
    mesh: TriMesh,
    k0: complex,
    N: int,
    J: int,
    metadata: dict[str, Any] | None = None,
) -> SpectralModel:
    """
    Run the FEM stage: assembly, 2N+1 solves at k0 and the J lowest eigenpairs.

    Raises:
        ModelError: For invalid k0, N or J.
        FemError: Propagated from assembly, factorization or the eigensolver.
    """
    k0 = complex(k0)
    if k0.imag >= 0:
        raise ModelError(f"Reference point k0 = {k0} must lie in the lower half plane")
    if N < 1:
        raise ModelError(f"Truncation N must be >= 1, got {N}")

    start = time.perf_counter()
    system = assemble(mesh, N)
    if J < 1 or J > system.d_n:
        raise ModelError(f"Corrector length J={J} outside 1..{system.d_n}")

    U = solve_all(system, k0)
    ahat0 = reference_matrix(U, system.B)
    pack = eig_lowest(system, J)

    meta = {"h": mesh.h, "n_vertices": mesh.n_vertices, "n_triangles": mesh.n_triangles}
    meta.update(metadata or {})
    model = SpectralModel(
        X=mesh.X,
        N=N,
        J=J,
        k0=k0,
        ahat0=ahat0,
        mu=pack.mu,
        traces=pack.traces,
        d_n=system.d_n,
        metadata=meta,
    )
    logger.info(
        f"Built spectral model N={N} J={J} d_n={system.d_n} k0={k0} "
        f"({time.perf_counter() - start:.2f}s)"
    )
    return model


def corrector_weights(model: SpectralModel, k: complex) -> np.ndarray:
    """(k^2 - k0^2) / ((mu_m - k^2)(mu_m - k0^2)) for every eigenvalue."""
    k2 = complex(k) ** 2
    k02 = model.k0**2
    return (k2 - k02) / ((model.mu - k2) * (model.mu - k02))


def eval_a(model: SpectralModel, k: complex) -> np.ndarray:
    """
    NtD matrix a_{alpha beta}(k) from the reference matrix and the corrector.

    Returns ahat0 itself (not a copy) at k = k0.

    Raises:
        ModelError: If k is not in the lower half plane.
    """
    k = complex(k)
    if k.imag >= 0:
        raise ModelError(f"k = {k} must lie in the lower half plane")
    if k == model.k0:
        return model.ahat0
    c = corrector_weights(model, k)
    t = model.traces
    return model.ahat0 + (t.T * c) @ t.conj()


def eval_t(model: SpectralModel, k: complex, a: np.ndarray | None = None) -> np.ndarray:
    """
    Assemble T_n(k) = 1/2 W^(1/2) (N1 + M_in N2) W^(-1/2).

    Column alpha + N is the input mode alpha and row beta + N the output mode,
    so the NtD operator matrix is a.T.

    Args:
        model: Spectral model.
        k: Wavenumber, Im k < 0.
        a: Optional NtD matrix overriding eval_a (e.g. zero for the bare N1 term).

    Raises:
        ModelError: If k is not in the lower half plane.
        TOverflowError: If an entry exceeds 1e300.
    """
    k = complex(k)
    ops = diag_operators(model.N, k, model.X)
    A = eval_a(model, k) if a is None else a
    root = np.sqrt(ops.nn)
    T = 0.5 * (np.diag(ops.n1) + A.T * ops.n2[None, :])
    T = T * root[:, None] / root[None, :]
    bad = ~np.isfinite(T) | (np.abs(T) > T_OVERFLOW_LIMIT)
    if bad.any():
        row, col = (int(i) for i in np.argwhere(bad)[0])
        raise TOverflowError(k, col - model.N, row - model.N)
    return T


# =============================================================================
# Serialization
# =============================================================================


def _complex_list(values: np.ndarray) -> list:
    arr = np.asarray(values, dtype=complex)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def _from_complex_list(data: list) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def model_to_dict(model: SpectralModel) -> dict[str, Any]:
    return {
        "format": MODEL_FORMAT,
        "X": model.X,
        "N": model.N,
        "J": model.J,
        "k0": [model.k0.real, model.k0.imag],
        "d_n": model.d_n,
        "mu": model.mu.tolist(),
        "traces": _complex_list(model.traces),
        "ahat0": _complex_list(model.ahat0),
        "metadata": model.metadata,
    }


def model_from_dict(data: dict[str, Any]) -> SpectralModel:
    if data.get("format") != MODEL_FORMAT:
        raise ModelError(f"Unsupported model format: {data.get('format')}")
    try:
        return SpectralModel(
            X=float(data["X"]),
            N=int(data["N"]),
            J=int(data["J"]),
            k0=complex(*data["k0"]),
            ahat0=_from_complex_list(data["ahat0"]),
            mu=np.asarray(data["mu"], dtype=float),
            traces=_from_complex_list(data["traces"]).reshape(int(data["J"]), -1),
            d_n=int(data["d_n"]),
            metadata=dict(data.get("metadata", {})),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ModelError(f"Malformed model data: {e}") from e


def save_model(model: SpectralModel, path: str | Path) -> Path:
    """Write the model as JSON; floats keep full round-trip precision."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(model_to_dict(model), sort_keys=True), encoding="utf-8")
    return out


def load_model(path: str | Path) -> SpectralModel:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ModelError(f"Invalid model file {path}: {e}") from e
    return model_from_dict(data)
