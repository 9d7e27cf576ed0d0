"""Pixelation of obstacles and tracing of pixel-union boundaries."""

import math
from dataclasses import dataclass
from pathlib import Path

import cv2
import numpy as np
from PIL import Image
from shapely.geometry import MultiPolygon, box
from shapely.geometry import Polygon as ShapelyPolygon
from shapely.ops import unary_union

from rough_resonance.geometry.obstacle import GeometryError, ObstacleSpec, extent, membership
from rough_resonance.geometry.polygons import Polygon, signed_area
from rough_resonance.logging import get_logger

logger = get_logger("geometry.pixels")

DEFAULT_MAX_CELLS = 4_000_000


class ResolutionOverflowError(GeometryError):
    """Raised when a pixelation would test more lattice points than allowed."""

    def __init__(self, n: int, cells: int, cap: int) -> None:
        self.n = n
        self.cells = cells
        self.cap = cap
        super().__init__(f"Pixelation at n={n} would test {cells} lattice points (cap {cap})", "n")


@dataclass(frozen=True)
class PixelSet:
    """
    Union of closed squares of side 1/n centered at lattice points.

    ``indices`` holds integer pairs (i, j) for the centers (i/n, j/n),
    sorted lexicographically.
    """

    n: int
    indices: np.ndarray

    @property
    def is_empty(self) -> bool:
        return len(self.indices) == 0

    @property
    def side(self) -> float:
        return 1.0 / self.n

    @property
    def centers(self) -> np.ndarray:
        return self.indices.astype(float) / self.n

    @property
    def area(self) -> float:
        return len(self.indices) / self.n**2

    def cell_set(self) -> set[tuple[int, int]]:
        return {(int(i), int(j)) for i, j in self.indices}

    def to_mask(self) -> tuple[np.ndarray, tuple[int, int]]:
        """
        Rasterize into a boolean image.

        Returns:
            (mask, (i_min, j_max)): row 0 holds the largest j, column 0 the smallest i.
        """
        if self.is_empty:
            return np.zeros((0, 0), dtype=bool), (0, 0)
        i_min, j_min = self.indices.min(axis=0)
        i_max, j_max = self.indices.max(axis=0)
        mask = np.zeros((j_max - j_min + 1, i_max - i_min + 1), dtype=bool)
        mask[j_max - self.indices[:, 1], self.indices[:, 0] - i_min] = True
        return mask, (int(i_min), int(j_max))

    def components(self) -> int:
        """Number of 4-connected components (corner contact does not connect)."""
        mask, _ = self.to_mask()
        if mask.size == 0:
            return 0
        count, _ = cv2.connectedComponents(mask.astype(np.uint8), connectivity=4)
        return int(count) - 1

    def exposed_edges(self) -> int:
        """Number of cell edges not shared with another cell."""
        cells = self.cell_set()
        exposed = 0
        for i, j in cells:
            for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                if (i + di, j + dj) not in cells:
                    exposed += 1
        return exposed

    @property
    def perimeter(self) -> float:
        return self.exposed_edges() / self.n

    def save_pgm(self, path: str | Path) -> Path:
        """Write the pixel set as a binary PGM (255 = inside)."""
        mask, _ = self.to_mask()
        out = Path(path)
        out.parent.mkdir(parents=True, exist_ok=True)
        Image.fromarray(mask.astype(np.uint8) * 255, mode="L").save(out, format="PPM")
        return out


def lattice_extent(spec: ObstacleSpec, n: int, X: float | None = None) -> int:
    """Largest lattice index that needs testing along either axis."""
    reach = extent(spec)
    if X is not None:
        reach = min(reach, X)
    return int(math.floor(reach * n + 1e-9))


def pixelate(
    spec: ObstacleSpec,
    n: int,
    X: float | None = None,
    max_cells: int = DEFAULT_MAX_CELLS,
) -> PixelSet:
    """
    Pixelate an obstacle at resolution n.

    A lattice point j in (1/n)Z^2 is kept iff membership(spec, j). Only points in
    the bounding box of the obstacle's extent disk are tested; any member lies there.

    Args:
        spec: Obstacle description.
        n: Lattice resolution (pixel side 1/n).
        X: Optional interface radius bounding the tested box.
        max_cells: Cap on the number of tested lattice points.

    Returns:
        PixelSet with the retained lattice indices.

    Raises:
        GeometryError: If n < 1.
        ResolutionOverflowError: If the tested box exceeds max_cells.
    """
    if n < 1:
        raise GeometryError(f"Pixel resolution must be >= 1, got {n}", "n")
    if spec.kind == "none":
        return PixelSet(n=n, indices=np.zeros((0, 2), dtype=np.int64))

    half = lattice_extent(spec, n, X)
    side = 2 * half + 1
    if side * side > max_cells:
        raise ResolutionOverflowError(n, side * side, max_cells)

    axis = np.arange(-half, half + 1, dtype=np.int64)
    ii, jj = np.meshgrid(axis, axis, indexing="ij")
    idx = np.column_stack([ii.ravel(), jj.ravel()])
    inside = membership(spec, idx.astype(float) / n)
    kept = idx[inside]
    logger.debug(f"pixelate kind={spec.kind} n={n}: {len(kept)} of {len(idx)} cells")
    return PixelSet(n=n, indices=kept)


def _row_runs(indices: np.ndarray) -> list[tuple[int, int, int]]:
    """Merge cells into horizontal runs (j, i_start, i_end)."""
    runs: list[tuple[int, int, int]] = []
    order = np.lexsort((indices[:, 0], indices[:, 1]))
    start = prev = None
    row = None
    for i, j in indices[order]:
        if row == j and prev is not None and i == prev + 1:
            prev = i
            continue
        if row is not None and start is not None and prev is not None:
            runs.append((row, start, prev))
        row, start, prev = j, i, i
    if row is not None and start is not None and prev is not None:
        runs.append((row, start, prev))
    return [(int(j), int(a), int(b)) for j, a, b in runs]


def _drop_collinear(coords: np.ndarray) -> np.ndarray:
    """Remove vertices lying on the segment between their neighbours."""
    pts = coords
    while True:
        prev = np.roll(pts, 1, axis=0)
        nxt = np.roll(pts, -1, axis=0)
        cross = (pts[:, 0] - prev[:, 0]) * (nxt[:, 1] - pts[:, 1]) - (pts[:, 1] - prev[:, 1]) * (
            nxt[:, 0] - pts[:, 0]
        )
        keep = cross != 0
        if keep.all():
            return pts
        pts = pts[keep]


def _ring_loop(coords: np.ndarray, ccw: bool, n: int) -> Polygon:
    # Shapely rings repeat the first point; coordinates are in half-pixel units
    ring = np.asarray(coords, dtype=float)[:-1]
    ring = _drop_collinear(ring)
    if (signed_area(ring) > 0) != ccw:
        ring = ring[::-1]
    return Polygon(ring / (2.0 * n), is_hole=not ccw)


def trace_pixel_boundary(p: PixelSet) -> list[Polygon]:
    """
    Trace the boundary loops of a pixel union.

    Cells touching only at a corner belong to different loops. Outer loops
    are counter-clockwise and holes clockwise; collinear vertices are removed.

    Args:
        p: Non-empty pixel set.

    Returns:
        Loops ordered by component (outer loop followed by its holes).

    Raises:
        GeometryError: If the pixel set is empty.
    """
    if p.is_empty:
        raise GeometryError("Cannot trace the boundary of an empty pixel set", "cells")

    # Doubled coordinates keep every pixel corner integral
    boxes = [box(2 * a - 1, 2 * j - 1, 2 * b + 1, 2 * j + 1) for j, a, b in _row_runs(p.indices)]
    union = unary_union(boxes)
    parts: list[ShapelyPolygon]
    if isinstance(union, MultiPolygon):
        parts = list(union.geoms)
    else:
        parts = [union]

    # Deterministic order: by lowest-left point of each component
    parts.sort(key=lambda g: (g.bounds[1], g.bounds[0]))
    loops: list[Polygon] = []
    for part in parts:
        loops.append(_ring_loop(np.asarray(part.exterior.coords), ccw=True, n=p.n))
        for interior in part.interiors:
            loops.append(_ring_loop(np.asarray(interior.coords), ccw=False, n=p.n))

    components = p.components()
    outer = sum(1 for loop in loops if not loop.is_hole)
    if outer != components:
        logger.warning(
            f"Traced {outer} outer loops for {components} 4-connected components at n={p.n}"
        )
    return loops
