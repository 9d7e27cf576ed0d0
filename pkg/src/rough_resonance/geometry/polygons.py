"""Polygons: obstacle loops, Koch prefractals and the interface polygon."""

import math
from dataclasses import dataclass

import numpy as np
import shapely

from rough_resonance.geometry.obstacle import KOCH_LEVEL_CAP, GeometryError, ObstacleSpec


def signed_area(vertices: np.ndarray) -> float:
    """Shoelace area; positive for counter-clockwise loops."""
    x = vertices[:, 0]
    y = vertices[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


@dataclass(frozen=True)
class Polygon:
    """
    Closed simple polygon.

    Vertices are stored without repeating the first point. Outer boundaries
    run counter-clockwise, holes clockwise.
    """

    vertices: np.ndarray
    is_hole: bool = False

    def __post_init__(self) -> None:
        verts = np.asarray(self.vertices, dtype=float).reshape(-1, 2)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 3:
            raise GeometryError(f"Polygon needs at least 3 vertices, got {len(verts)}")
        gaps = np.linalg.norm(verts - np.roll(verts, -1, axis=0), axis=1)
        if np.any(gaps == 0):
            raise GeometryError("Polygon has repeated consecutive vertices")

    @property
    def perimeter(self) -> float:
        edges = np.roll(self.vertices, -1, axis=0) - self.vertices
        return float(np.sum(np.hypot(edges[:, 0], edges[:, 1])))

    @property
    def area(self) -> float:
        """Unsigned enclosed area."""
        return abs(signed_area(self.vertices))

    @property
    def is_ccw(self) -> bool:
        return signed_area(self.vertices) > 0

    def is_simple(self) -> bool:
        """Check the loop for self-intersections."""
        return bool(shapely.LinearRing(self.vertices).is_simple)

    def edges(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """Consecutive vertex pairs, closing the loop."""
        nxt = np.roll(self.vertices, -1, axis=0)
        return list(zip(self.vertices, nxt, strict=True))

    def contains(self, x: float, y: float) -> bool:
        """Closed point-in-polygon test."""
        return bool(shapely.intersects_xy(shapely.Polygon(self.vertices), x, y))


@dataclass(frozen=True)
class InterfacePolygon:
    """Regular polygon inscribed in the circle of radius X."""

    X: float
    corners: np.ndarray
    angles: np.ndarray

    @property
    def m_b(self) -> int:
        return len(self.corners)

    @property
    def sagitta(self) -> float:
        """Maximum distance between a chord and its arc."""
        return self.X * (1.0 - math.cos(math.pi / self.m_b))

    @property
    def chord_length(self) -> float:
        return 2.0 * self.X * math.sin(math.pi / self.m_b)

    @property
    def perimeter(self) -> float:
        return self.m_b * self.chord_length

    @property
    def area(self) -> float:
        return 0.5 * self.m_b * self.X**2 * math.sin(2.0 * math.pi / self.m_b)

    def chord(self, j: int) -> tuple[int, int]:
        """Corner indices bounding chord j."""
        return j % self.m_b, (j + 1) % self.m_b


def ball_polygon(X: float, m_b: int) -> InterfacePolygon:
    """
    Inscribe a regular m_b-gon in the circle of radius X.

    Corner j sits at angle 2*pi*j/m_b.

    Raises:
        GeometryError: If X <= 0 or m_b < 3.
    """
    if m_b < 3:
        raise GeometryError(f"Interface polygon needs m_b >= 3, got {m_b}", "m_b")
    if X <= 0:
        raise GeometryError("Interface radius must be positive", "X")
    angles = 2.0 * np.pi * np.arange(m_b) / m_b
    corners = X * np.column_stack([np.cos(angles), np.sin(angles)])
    return InterfacePolygon(X=float(X), corners=corners, angles=angles)


def default_m_b(X: float, h_target: float) -> int:
    """Corner count keeping the chord sagitta O(h^2)."""
    return max(16, math.ceil(2.0 * math.pi * X / h_target))


def koch_prefractal(
    level: int,
    scale: float = 0.5,
    center: tuple[float, float] = (0.0, 0.0),
    cap: int = KOCH_LEVEL_CAP,
) -> Polygon:
    """
    Build the level-L Koch snowflake prefractal.

    Level 0 is the equilateral triangle with circumradius ``scale``; each level
    replaces every edge by four edges of a third of its length, bulging outward.

    Args:
        level: Prefractal level, 0..cap.
        scale: Circumradius of the level-0 triangle.
        center: Snowflake center.
        cap: Maximum allowed level.

    Returns:
        Counter-clockwise polygon with 3 * 4**level vertices.

    Raises:
        GeometryError: If level is negative or above the cap.
    """
    if level < 0 or level > cap:
        raise GeometryError(f"Koch level must lie in 0..{cap}, got {level}", "level")

    angles = np.pi / 2 + 2.0 * np.pi * np.arange(3) / 3
    verts = scale * np.column_stack([np.cos(angles), np.sin(angles)])

    # Outward bulge for a CCW loop is a clockwise rotation of the edge direction
    rot = np.array([[0.5, math.sqrt(3) / 2], [-math.sqrt(3) / 2, 0.5]])
    for _ in range(level):
        a = verts
        d = (np.roll(verts, -1, axis=0) - a) / 3.0
        p1 = a + d
        peak = p1 + d @ rot.T
        p2 = a + 2.0 * d
        verts = np.stack([a, p1, peak, p2], axis=1).reshape(-1, 2)

    return Polygon(verts + np.asarray(center, dtype=float))


def obstacle_polygons(
    spec: ObstacleSpec,
    n: int,
    X: float,
    max_cells: int = 4_000_000,
    approximation: str = "polygon",
    h_target: float = 0.05,
) -> list[Polygon]:
    """
    Polygonal approximation of an obstacle boundary for meshing.

    Args:
        spec: Obstacle description.
        n: Pixel resolution used when pixelating.
        X: Interface radius.
        max_cells: Cap on tested lattice points.
        approximation: "polygon" uses the exact prefractal for Koch obstacles and an
            inscribed polygon with edges no longer than h_target for disks; "pixel"
            pixelates every kind. Julia and pixel-oracle obstacles are always pixelated.
        h_target: Target edge length for inscribed disk polygons.

    Returns:
        Boundary loops (outer loops CCW, holes CW).
    """
    from rough_resonance.geometry.pixels import pixelate, trace_pixel_boundary

    if approximation not in ("polygon", "pixel"):
        raise GeometryError(f"Unknown approximation: {approximation}", "approximation")
    if spec.kind == "none":
        return []
    if approximation == "polygon" and spec.kind == "koch":
        return [koch_prefractal(spec.level, spec.scale, spec.center, spec.level_cap)]
    if approximation == "polygon" and spec.kind == "disk":
        segments = max(16, math.ceil(2.0 * math.pi * spec.radius / h_target))
        return [disk_polygon(spec.radius, spec.center, segments)]
    pixels = pixelate(spec, n, X=X, max_cells=max_cells)
    if pixels.is_empty:
        return []
    return trace_pixel_boundary(pixels)


def disk_polygon(radius: float, center: tuple[float, float], segments: int) -> Polygon:
    """Regular polygon inscribed in a disk, vertices on the circle."""
    if segments < 3:
        raise GeometryError("Disk polygon needs at least 3 segments", "segments")
    angles = 2.0 * np.pi * np.arange(segments) / segments
    verts = np.column_stack(
        [center[0] + radius * np.cos(angles), center[1] + radius * np.sin(angles)]
    )
    return Polygon(verts)
