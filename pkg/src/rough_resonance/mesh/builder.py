"""Constrained quality Delaunay meshing of the inner domain."""

import math
import time

import numpy as np
import shapely
import triangle

from rough_resonance.geometry.polygons import InterfacePolygon, Polygon
from rough_resonance.logging import get_logger
from rough_resonance.mesh.trimesh import (
    DEFAULT_QUALITY_CAP,
    DIRICHLET,
    INTERFACE,
    INTERIOR,
    MeshError,
    MeshGeometryError,
    MeshQualityError,
    TriMesh,
    mesh_quality,
    validate_mesh,
)

logger = get_logger("mesh")

OBSTACLE_MARKER = 1
CHORD_MARKER_OFFSET = 2
MIN_ANGLE = 30.0
MAX_REFINEMENTS = 16


class _VertexTable:
    """Deduplicating vertex list; loops touching at a corner share the vertex."""

    def __init__(self) -> None:
        self.points: list[tuple[float, float]] = []
        self.index: dict[tuple[float, float], int] = {}

    def add(self, x: float, y: float) -> int:
        key = (float(x), float(y))
        if key not in self.index:
            self.index[key] = len(self.points)
            self.points.append(key)
        return self.index[key]


def _check_geometry(obstacles: list[Polygon], interface: InterfacePolygon) -> None:
    outer = shapely.Polygon(interface.corners)
    shapes = [shapely.Polygon(p.vertices) for p in obstacles]
    for idx, shape in enumerate(shapes):
        if not shape.is_valid:
            raise MeshGeometryError(f"Obstacle loop {idx} is not a simple polygon")
        if not outer.contains(shape) or shape.distance(outer.exterior) <= 0:
            raise MeshGeometryError(f"Obstacle loop {idx} reaches the interface polygon")
    for i in range(len(shapes)):
        for j in range(i + 1, len(shapes)):
            if shapes[i].intersection(shapes[j]).area > 0:
                raise MeshGeometryError(f"Obstacle loops {i} and {j} overlap")


def triangle_switches(max_area: float) -> str:
    """Switch string for triangle: quality, area bound in fixed-point notation, quiet."""
    if not max_area > 0:
        raise MeshError(f"Area bound must be positive, got {max_area}")
    # Triangle's switch parser reads digits and '.', never an exponent
    return f"pq{MIN_ANGLE:g}a{max_area:.20f}Q"


def _triangulate(
    table: _VertexTable,
    segments: list[tuple[int, int]],
    markers: list[int],
    holes: list[tuple[float, float]],
    max_area: float,
) -> dict:
    data: dict = {
        "vertices": np.asarray(table.points, dtype=float),
        "segments": np.asarray(segments, dtype=np.int32),
        "segment_markers": np.asarray(markers, dtype=np.int32).reshape(-1, 1),
    }
    if holes:
        data["holes"] = np.asarray(holes, dtype=float)
    return triangle.triangulate(data, triangle_switches(max_area))


def _to_trimesh(result: dict, m_b: int) -> TriMesh:
    vertices = np.asarray(result["vertices"], dtype=float)
    triangles = np.asarray(result["triangles"], dtype=np.int64)
    segs = np.asarray(result["segments"], dtype=np.int64)
    marks = np.asarray(result["segment_markers"], dtype=np.int64).ravel()

    # Triangle emits CCW elements; re-check so downstream signs are reliable
    p = vertices[triangles]
    cross = (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1]) - (
        p[:, 1, 1] - p[:, 0, 1]
    ) * (p[:, 2, 0] - p[:, 0, 0])
    flip = cross < 0
    triangles[flip] = triangles[flip][:, [0, 2, 1]]

    tags = np.full(len(vertices), INTERIOR, dtype=np.int8)
    on_obstacle = segs[marks == OBSTACLE_MARKER]
    tags[on_obstacle.ravel()] = DIRICHLET
    iface_mask = marks >= CHORD_MARKER_OFFSET
    iface = segs[iface_mask]
    tags[iface.ravel()] = INTERFACE

    chord = marks[iface_mask] - CHORD_MARKER_OFFSET
    # Input corners keep their indices 0..m_b-1 in Triangle's output
    chords = np.column_stack([chord % m_b, (chord + 1) % m_b])

    order = np.lexsort((iface.min(axis=1), chord))
    return TriMesh(
        vertices=vertices,
        triangles=triangles,
        tags=tags,
        interface_edges=iface[order],
        edge_chords=chords[order],
    )


def build_mesh(
    obstacle_polys: list[Polygon],
    interface: InterfacePolygon,
    h_target: float,
    quality_cap: float = DEFAULT_QUALITY_CAP,
) -> TriMesh:
    """
    Triangulate the region between the interface polygon and the obstacle loops.

    Interface corners and obstacle vertices are forced into the vertex set. The
    maximum element area is reduced until every edge is at most h_target.
    Holes inside obstacle loops (enclosed cavities) are filled: they are
    disconnected from the interface and carry no exterior field.

    Args:
        obstacle_polys: Obstacle boundary loops; holes (is_hole) are ignored.
        interface: Interface polygon inscribed in the circle of radius X.
        h_target: Target maximum edge length.
        quality_cap: Upper bound on the shape constant C_theta.

    Returns:
        Validated TriMesh.

    Raises:
        MeshGeometryError: If an obstacle loop is invalid or reaches the interface.
        MeshQualityError: If h_target or the quality cap cannot be met.
    """
    if h_target <= 0:
        raise MeshQualityError(f"h_target must be positive, got {h_target}")

    outer_loops = [p for p in obstacle_polys if not p.is_hole]
    cavities = len(obstacle_polys) - len(outer_loops)
    if cavities:
        logger.warning(f"Filling {cavities} enclosed cavities of the obstacle")
    _check_geometry(outer_loops, interface)

    table = _VertexTable()
    segments: list[tuple[int, int]] = []
    markers: list[int] = []
    m_b = interface.m_b
    for j in range(m_b):
        table.add(*interface.corners[j])
    for j in range(m_b):
        segments.append((j, (j + 1) % m_b))
        markers.append(CHORD_MARKER_OFFSET + j)

    holes: list[tuple[float, float]] = []
    for loop in outer_loops:
        ids = [table.add(x, y) for x, y in loop.vertices]
        for a, b in zip(ids, ids[1:] + ids[:1], strict=True):
            segments.append((a, b))
            markers.append(OBSTACLE_MARKER)
        point = shapely.Polygon(loop.vertices).representative_point()
        holes.append((point.x, point.y))

    start = time.perf_counter()
    max_area = 0.4 * h_target**2
    mesh: TriMesh | None = None
    for attempt in range(MAX_REFINEMENTS):
        result = _triangulate(table, segments, markers, holes, max_area)
        mesh = _to_trimesh(result, m_b)
        logger.debug(
            f"mesh attempt {attempt}: area<={max_area:.3g} nt={mesh.n_triangles} h={mesh.h:.4g}"
        )
        if mesh.h <= h_target:
            break
        max_area *= 0.7 * (h_target / mesh.h) ** 2 if mesh.h > 2 * h_target else 0.7
    assert mesh is not None
    if mesh.h > h_target:
        raise MeshQualityError(
            f"Could not reach h <= {h_target} after {MAX_REFINEMENTS} refinements "
            f"(h = {mesh.h:.4g})"
        )

    validate_mesh(mesh, quality_cap=quality_cap)
    quality = mesh_quality(mesh)
    logger.info(
        f"Built mesh: nv={mesh.n_vertices} nt={mesh.n_triangles} h={quality.h:.4g} "
        f"C_theta={quality.C_theta:.3f} d_n={quality.d_n} "
        f"({time.perf_counter() - start:.2f}s)"
    )
    return mesh


def expected_area(obstacle_polys: list[Polygon], interface: InterfacePolygon) -> float:
    """Area of the interface polygon minus the obstacle loops."""
    outer = [p for p in obstacle_polys if not p.is_hole]
    return interface.area - math.fsum(p.area for p in outer)
