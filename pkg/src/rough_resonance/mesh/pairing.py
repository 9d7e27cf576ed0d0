"""Piecewise-affine interpolation of the Fourier basis on the interface polygon."""

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from rough_resonance.mesh.trimesh import TriMesh


@dataclass(frozen=True)
class BoundaryBasisPairing:
    """
    Nodal values and pairing weights of the interpolated mode e_alpha.

    ``values[i]`` is the interpolant at interface vertex ``vertex_ids[i]`` and
    ``weights[i]`` the integral of the interpolant against that vertex's hat
    function over the interface polygon.
    """

    alpha: int
    vertex_ids: np.ndarray
    values: np.ndarray
    weights: np.ndarray


def basis_value(alpha: np.ndarray | int, theta: np.ndarray | float, X: float) -> np.ndarray:
    """e_alpha(theta) = (2 pi X)^(-1/2) exp(i alpha theta)."""
    return np.exp(1j * np.multiply.outer(theta, alpha)) / math.sqrt(2.0 * math.pi * X)


def interface_vertices(t: TriMesh) -> np.ndarray:
    """Sorted indices of vertices on the interface polygon."""
    return np.unique(t.interface_edges.ravel())


def chord_coordinates(t: TriMesh) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Locate every interface vertex on its chord.

    Returns:
        (vertex_ids, corner_a, corner_b, s): vertex p equals
        (1 - s) * corner_a + s * corner_b.
    """
    ids = interface_vertices(t)
    ca = np.empty(len(ids), dtype=np.int64)
    cb = np.empty(len(ids), dtype=np.int64)
    lookup = {int(v): i for i, v in enumerate(ids)}
    for (va, vb), (a, b) in zip(t.interface_edges, t.edge_chords, strict=True):
        for v in (va, vb):
            slot = lookup[int(v)]
            ca[slot] = a
            cb[slot] = b
    pa = t.vertices[ca]
    pb = t.vertices[cb]
    d = pb - pa
    s = np.einsum("ij,ij->i", t.vertices[ids] - pa, d) / np.einsum("ij,ij->i", d, d)
    s = np.clip(s, 0.0, 1.0)
    # Corners carry their exact basis value
    s[ids == ca] = 0.0
    s[ids == cb] = 1.0
    return ids, ca, cb, s


def interface_mass(t: TriMesh) -> sparse.csr_matrix:
    """P1 mass matrix of the interface polygon over all mesh vertices."""
    va = t.interface_edges[:, 0]
    vb = t.interface_edges[:, 1]
    length = np.linalg.norm(t.vertices[vb] - t.vertices[va], axis=1)
    rows = np.concatenate([va, vb, va, vb])
    cols = np.concatenate([va, vb, vb, va])
    vals = np.concatenate([length / 3.0, length / 3.0, length / 6.0, length / 6.0])
    n = t.n_vertices
    return sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))


def interpolant_matrix(t: TriMesh, N: int) -> np.ndarray:
    """
    Nodal values of the interpolated modes alpha = -N..N.

    Returns:
        (nv, 2N+1) complex matrix, zero away from the interface.
    """
    X = t.X
    alphas = np.arange(-N, N + 1)
    ids, ca, cb, s = chord_coordinates(t)
    theta_a = np.arctan2(t.vertices[ca, 1], t.vertices[ca, 0])
    theta_b = np.arctan2(t.vertices[cb, 1], t.vertices[cb, 0])
    values = (1.0 - s)[:, None] * basis_value(alphas, theta_a, X) + s[:, None] * basis_value(
        alphas, theta_b, X
    )
    F = np.zeros((t.n_vertices, len(alphas)), dtype=complex)
    F[ids] = values
    return F


def pairing_matrix(t: TriMesh, N: int) -> np.ndarray:
    """
    Pairing weights of all modes against all hat functions.

    Column alpha + N holds (interpolated e_alpha, phi_i) on the interface, computed
    exactly with the edge mass matrix L/6 [[2, 1], [1, 2]].
    """
    return np.asarray(interface_mass(t) @ interpolant_matrix(t, N))


def boundary_pairing(t: TriMesh, alpha: int) -> BoundaryBasisPairing:
    """Nodal values and pairing weights of one interpolated mode."""
    N = abs(alpha)
    ids = interface_vertices(t)
    F = interpolant_matrix(t, N)[:, alpha + N]
    W = np.asarray(interface_mass(t) @ F)
    return BoundaryBasisPairing(alpha=alpha, vertex_ids=ids, values=F[ids], weights=W[ids])
