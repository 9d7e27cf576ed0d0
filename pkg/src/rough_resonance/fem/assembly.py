"""P1 finite element assembly with Dirichlet elimination."""

import time
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from rough_resonance.logging import get_logger
from rough_resonance.mesh.pairing import pairing_matrix
from rough_resonance.mesh.trimesh import TriMesh

logger = get_logger("fem")


class FemError(Exception):
    """Base error for finite element computations."""


@dataclass(frozen=True, eq=False)
class FemSystem:
    """
    Stiffness, mass and boundary loads restricted to the free vertices.

    Attributes:
        K: (d_n, d_n) stiffness matrix.
        M: (d_n, d_n) mass matrix.
        free: Mesh indices of the free vertices (row i of K is vertex free[i]).
        B: (d_n, 2N+1) complex loads; column alpha + N is b_alpha.
        N: Highest mode.
    """

    K: sparse.csr_matrix
    M: sparse.csr_matrix
    free: np.ndarray
    B: np.ndarray
    N: int
    mesh: TriMesh = field(repr=False)
    _factors: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def d_n(self) -> int:
        return len(self.free)

    def load(self, alpha: int) -> np.ndarray:
        """Load vector b_alpha."""
        if abs(alpha) > self.N:
            raise FemError(f"Mode {alpha} outside -{self.N}..{self.N}")
        return self.B[:, alpha + self.N]


def element_matrices(t: TriMesh) -> tuple[np.ndarray, np.ndarray]:
    """
    Exact P1 element matrices.

    Returns:
        (Ke, Me), each of shape (nt, 3, 3).

    Raises:
        FemError: If an element has zero area.
    """
    p = t.vertices[t.triangles]
    x, y = p[..., 0], p[..., 1]
    b = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    c = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
    area = 0.5 * (b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0])
    degenerate = np.flatnonzero(np.abs(area) <= 0)
    if len(degenerate):
        raise FemError(f"Element {int(degenerate[0])} has zero area")

    Ke = (b[:, :, None] * b[:, None, :] + c[:, :, None] * c[:, None, :]) / (
        4.0 * np.abs(area)[:, None, None]
    )
    local = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]) / 12.0
    Me = np.abs(area)[:, None, None] * local
    return Ke, Me


def assemble_global(t: TriMesh) -> tuple[sparse.csr_matrix, sparse.csr_matrix]:
    """Global stiffness and mass matrices over all vertices, exactly symmetric."""
    Ke, Me = element_matrices(t)
    rows = np.repeat(t.triangles, 3, axis=1).ravel()
    cols = np.tile(t.triangles, (1, 3)).ravel()
    n = t.n_vertices
    K = sparse.coo_matrix((Ke.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    M = sparse.coo_matrix((Me.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    K = ((K + K.T) * 0.5).tocsr()
    M = ((M + M.T) * 0.5).tocsr()
    return K, M


def assemble(t: TriMesh, N: int) -> FemSystem:
    """
    Assemble the P1 system on the free vertices.

    Args:
        t: Mesh.
        N: Highest Fourier mode of the boundary loads.

    Returns:
        FemSystem with K, M and loads b_alpha for alpha = -N..N.
    """
    start = time.perf_counter()
    K, M = assemble_global(t)
    free = t.free
    B_all = pairing_matrix(t, N)
    system = FemSystem(
        K=K[free][:, free].tocsr(),
        M=M[free][:, free].tocsr(),
        free=free,
        B=B_all[free],
        N=N,
        mesh=t,
    )
    logger.info(
        f"Assembled FEM system d_n={system.d_n} N={N} nnz(K)={system.K.nnz} "
        f"({time.perf_counter() - start:.2f}s)"
    )
    return system


def dump_coordinate_text(matrix: sparse.spmatrix) -> str:
    """Coordinate text dump: one 'row col value' line per stored entry."""
    coo = sparse.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    lines = [f"{coo.shape[0]} {coo.shape[1]} {coo.nnz}"]
    for r, c, v in zip(coo.row[order], coo.col[order], coo.data[order], strict=True):
        lines.append(f"{r} {c} {v!r}")
    return "\n".join(lines) + "\n"
