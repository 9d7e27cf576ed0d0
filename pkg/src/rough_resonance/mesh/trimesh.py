"""Triangle meshes of the inner domain with boundary tags."""

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

INTERIOR = 0
DIRICHLET = 1
INTERFACE = 2

TAG_CODES = {INTERIOR: "i", DIRICHLET: "d", INTERFACE: "g"}
TAG_VALUES = {code: value for value, code in TAG_CODES.items()}

DEFAULT_QUALITY_CAP = 4.0


class MeshError(Exception):
    """Base error for mesh construction and validation."""


class MeshGeometryError(MeshError):
    """Raised when the obstacle and interface polygons are incompatible."""


class MeshQualityError(MeshError):
    """Raised when the mesher cannot meet the quality or size targets."""

    def __init__(self, message: str, element: int | None = None, value: float | None = None):
        self.element = element
        self.value = value
        where = f" (element {element}, value {value:.4g})" if element is not None else ""
        super().__init__(f"{message}{where}")


class MeshValidationError(MeshError):
    """Raised when a mesh violates a structural invariant."""

    def __init__(self, message: str, element: int | None = None):
        self.element = element
        where = f" at element {element}" if element is not None else ""
        super().__init__(f"{message}{where}")


@dataclass(frozen=True)
class MeshQuality:
    """Shape constant, mesh size and free-vertex count."""

    C_theta: float
    h: float
    d_n: int
    worst_element: int = -1


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TriMesh:
    """
    Conforming P1 triangulation of the region between the interface polygon and
    the obstacle loops.

    Attributes:
        vertices: (nv, 2) coordinates.
        triangles: (nt, 3) counter-clockwise vertex triples.
        tags: (nv,) one of INTERIOR, DIRICHLET, INTERFACE.
        interface_edges: (ne, 2) boundary edges lying on the interface polygon.
        edge_chords: (ne, 2) vertex indices of the two polygon corners whose
            chord contains each interface edge.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    tags: np.ndarray
    interface_edges: np.ndarray
    edge_chords: np.ndarray
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", _readonly(np.asarray(self.vertices, float)))
        object.__setattr__(self, "triangles", _readonly(np.asarray(self.triangles, np.int64)))
        object.__setattr__(self, "tags", _readonly(np.asarray(self.tags, np.int8)))
        edges = np.asarray(self.interface_edges, np.int64).reshape(-1, 2)
        chords = np.asarray(self.edge_chords, np.int64).reshape(-1, 2)
        object.__setattr__(self, "interface_edges", _readonly(edges))
        object.__setattr__(self, "edge_chords", _readonly(chords))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @cached_property
    def areas(self) -> np.ndarray:
        """Signed triangle areas (positive for CCW)."""
        p = self.vertices[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        """(nt, 3) lengths of the edge opposite each local vertex."""
        p = self.vertices[self.triangles]
        return np.stack(
            [
                np.linalg.norm(p[:, 2] - p[:, 1], axis=1),
                np.linalg.norm(p[:, 0] - p[:, 2], axis=1),
                np.linalg.norm(p[:, 1] - p[:, 0], axis=1),
            ],
            axis=1,
        )

    @cached_property
    def h(self) -> float:
        return float(self.edge_lengths.max()) if self.n_triangles else 0.0

    @cached_property
    def X(self) -> float:
        """Interface radius, taken from the outermost interface vertex."""
        iface = self.vertices[self.tags == INTERFACE]
        if len(iface) == 0:
            return 0.0
        return float(np.max(np.hypot(iface[:, 0], iface[:, 1])))

    @property
    def free(self) -> np.ndarray:
        """Indices of vertices not on the obstacle boundary."""
        return np.flatnonzero(self.tags != DIRICHLET)

    @property
    def d_n(self) -> int:
        return int(np.count_nonzero(self.tags != DIRICHLET))

    @property
    def corners(self) -> np.ndarray:
        """Vertex indices of interface polygon corners, in chord order."""
        return np.unique(self.edge_chords.ravel())

    @property
    def area(self) -> float:
        return float(self.areas.sum())

    def interface_length(self) -> float:
        seg = self.vertices[self.interface_edges[:, 1]] - self.vertices[self.interface_edges[:, 0]]
        return float(np.sum(np.hypot(seg[:, 0], seg[:, 1])))

    def edge_counts(self) -> dict[tuple[int, int], int]:
        """Number of triangles sharing each undirected edge."""
        counts: dict[tuple[int, int], int] = {}
        for tri in self.triangles:
            for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
                key = (int(min(a, b)), int(max(a, b)))
                counts[key] = counts.get(key, 0) + 1
        return counts


def mesh_quality(t: TriMesh) -> MeshQuality:
    """
    Shape-regularity constant of a mesh.

    C_theta is the maximum over elements T and their edges e of
    max(|e| / |T|^(1/2), |T|^(1/2) / |e|); h is the longest edge and d_n the
    number of vertices not tagged dirichlet.
    """
    if t.n_triangles == 0:
        return MeshQuality(C_theta=math.inf, h=0.0, d_n=t.d_n)
    root = np.sqrt(np.abs(t.areas))[:, None]
    lengths = t.edge_lengths
    with np.errstate(divide="ignore"):
        ratios = np.maximum(lengths / root, root / lengths)
    per_element = ratios.max(axis=1)
    worst = int(np.argmax(per_element))
    return MeshQuality(
        C_theta=float(per_element[worst]), h=t.h, d_n=t.d_n, worst_element=worst
    )


def validate_mesh(t: TriMesh, quality_cap: float | None = None, tol: float = 1e-10) -> None:
    """
    Check the structural invariants of a mesh.

    Args:
        t: Mesh to check.
        quality_cap: Optional upper bound on C_theta.
        tol: Relative tolerance for interface vertices lying on their chord.

    Raises:
        MeshValidationError: Naming the offending element when possible.
        MeshQualityError: If the quality cap is exceeded.
    """
    nv = t.n_vertices
    if t.n_triangles == 0:
        raise MeshValidationError("Mesh has no triangles")
    if t.triangles.min() < 0 or t.triangles.max() >= nv:
        out_of_range = (t.triangles < 0).any(axis=1) | (t.triangles >= nv).any(axis=1)
        bad = int(np.flatnonzero(out_of_range)[0])
        raise MeshValidationError("Triangle references a missing vertex", bad)
    if len(t.tags) != nv:
        raise MeshValidationError(f"Expected {nv} vertex tags, got {len(t.tags)}")

    nonpositive = np.flatnonzero(t.areas <= 0)
    if len(nonpositive):
        raise MeshValidationError("Triangle has non-positive area", int(nonpositive[0]))

    counts = t.edge_counts()
    for (a, b), count in counts.items():
        if count > 2:
            raise MeshValidationError(f"Edge ({a}, {b}) is shared by {count} triangles")

    boundary = {edge for edge, count in counts.items() if count == 1}
    for idx, (a, b) in enumerate(t.interface_edges):
        key = (int(min(a, b)), int(max(a, b)))
        if key not in boundary:
            raise MeshValidationError(f"Interface edge {idx} ({a}, {b}) is not a boundary edge")
    for a, b in boundary:
        if t.tags[a] == INTERIOR or t.tags[b] == INTERIOR:
            raise MeshValidationError(f"Boundary edge ({a}, {b}) has an interior-tagged vertex")

    # Edge connectivity through shared edges
    adjacency = _triangle_adjacency(t)
    n_parts, _ = connected_components(adjacency, directed=False)
    if n_parts != 1:
        raise MeshValidationError(f"Mesh splits into {n_parts} edge-connected parts")

    X = t.X
    for idx, ((a, b), (ca, cb)) in enumerate(zip(t.interface_edges, t.edge_chords, strict=True)):
        pa, pb = t.vertices[ca], t.vertices[cb]
        for v in (a, b):
            if _segment_distance(t.vertices[v], pa, pb) > tol * max(X, 1.0):
                raise MeshValidationError(f"Interface vertex {v} is off its chord (edge {idx})")

    if quality_cap is not None:
        q = mesh_quality(t)
        if q.C_theta > quality_cap:
            raise MeshQualityError(
                f"Shape constant exceeds cap {quality_cap}", q.worst_element, q.C_theta
            )


def _segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    d = b - a
    t = float(np.clip(np.dot(p - a, d) / np.dot(d, d), 0.0, 1.0))
    return float(np.linalg.norm(p - (a + t * d)))


def _triangle_adjacency(t: TriMesh) -> sparse.csr_matrix:
    owners: dict[tuple[int, int], list[int]] = {}
    for idx, tri in enumerate(t.triangles):
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            owners.setdefault((int(min(a, b)), int(max(a, b))), []).append(idx)
    rows, cols = [], []
    for tris in owners.values():
        if len(tris) == 2:
            rows.extend(tris)
            cols.extend(tris[::-1])
    n = t.n_triangles
    return sparse.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
