"""Obstacle descriptions and point-membership oracles."""

import math
from collections.abc import Callable
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Any, Literal

import cv2
import numpy as np
import shapely

from rough_resonance.logging import get_logger

logger = get_logger("geometry")

ObstacleKind = Literal["disk", "koch", "julia", "pixel-oracle", "none"]
OBSTACLE_KINDS: tuple[str, ...] = ("disk", "koch", "julia", "pixel-oracle", "none")

# Default cap on Koch prefractal levels
KOCH_LEVEL_CAP = 8

MembershipCallback = Callable[[np.ndarray], np.ndarray]


class GeometryError(Exception):
    """Raised when an obstacle or geometric construction is invalid."""

    def __init__(self, message: str, field_name: str | None = None) -> None:
        self.field_name = field_name
        location = f" (field '{field_name}')" if field_name else ""
        super().__init__(f"{message}{location}")


@dataclass(frozen=True)
class ObstacleSpec:
    """
    Declarative obstacle description.

    Only the parameters relevant to ``kind`` are read:

    - disk: ``radius``, ``center``
    - koch: ``level``, ``scale`` (circumradius of the level-0 triangle), ``center``
    - julia: ``c``, ``max_iter``, ``bailout``, ``scale``, ``center``
    - pixel-oracle: ``bitmap`` (bool array, row 0 on top) with ``pixel_size`` and
      ``origin`` (lower-left corner), or a vectorised ``oracle`` callback with ``extent``
    """

    kind: ObstacleKind = "disk"
    radius: float = 0.5
    center: tuple[float, float] = (0.0, 0.0)
    level: int = 0
    scale: float = 0.5
    c: complex = 0j
    max_iter: int = 400
    bailout: float = 2.0
    bitmap: np.ndarray | None = field(default=None, compare=False, repr=False)
    pixel_size: float = 0.01
    origin: tuple[float, float] = (0.0, 0.0)
    oracle: MembershipCallback | None = field(default=None, compare=False, repr=False)
    extent_hint: float | None = None
    level_cap: int = KOCH_LEVEL_CAP

    @classmethod
    def julia_from_q(cls, q: float, **kwargs: Any) -> "ObstacleSpec":
        """Filled Julia set obstacle with c = q(-1 + 0.2i)."""
        return cls(kind="julia", c=q * complex(-1.0, 0.2), **kwargs)

    def validate(self, X: float | None = None) -> list[str]:
        """
        Validate the obstacle parameters.

        Args:
            X: Optional interface radius. When given, the obstacle must fit inside
               B_X(0); violating the B_{X-1}(0) margin only produces a warning.

        Returns:
            List of warnings (hard violations raise).

        Raises:
            GeometryError: If a parameter is out of range.
        """
        if self.kind not in OBSTACLE_KINDS:
            raise GeometryError(f"Unknown obstacle kind: {self.kind}", "kind")
        if self.kind == "disk" and self.radius <= 0:
            raise GeometryError("Disk radius must be positive", "radius")
        if self.kind == "koch":
            if self.level < 0 or self.level > self.level_cap:
                raise GeometryError(
                    f"Koch level must lie in 0..{self.level_cap}, got {self.level}", "level"
                )
            if self.scale <= 0:
                raise GeometryError("Koch scale must be positive", "scale")
        if self.kind == "julia":
            if self.max_iter < 1:
                raise GeometryError("Julia max_iter must be positive", "max_iter")
            if self.bailout < 2:
                raise GeometryError("Julia bailout must be at least 2", "bailout")
            if self.scale <= 0:
                raise GeometryError("Julia scale must be positive", "scale")
        if self.kind == "pixel-oracle":
            if self.bitmap is None and self.oracle is None:
                raise GeometryError("pixel-oracle needs a bitmap or a callback", "bitmap")
            if self.oracle is not None and self.extent_hint is None:
                raise GeometryError("callback oracles need an extent", "extent_hint")
            if self.pixel_size <= 0:
                raise GeometryError("Bitmap pixel size must be positive", "pixel_size")

        warnings: list[str] = []
        if X is not None and self.kind != "none":
            reach = extent(self)
            if reach >= X:
                raise GeometryError(
                    f"Obstacle extent {reach:.6g} does not fit inside B_X(0) with X = {X}", "X"
                )
            if reach > X - 1:
                warnings.append(
                    f"Obstacle extent {reach:.6g} exceeds the B_(X-1)(0) margin for X = {X}"
                )
        for warning in warnings:
            logger.warning(warning)
        return warnings


def extent(spec: ObstacleSpec) -> float:
    """Radius of a disk about the origin guaranteed to contain the obstacle."""
    cx, cy = spec.center
    offset = math.hypot(cx, cy)
    if spec.kind == "none":
        return 0.0
    if spec.kind == "disk":
        return offset + spec.radius
    if spec.kind == "koch":
        return offset + spec.scale
    if spec.kind == "julia":
        # The filled Julia set of z^2 + c lies in |z| <= (1 + sqrt(1 + 4|c|)) / 2
        radius = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * abs(spec.c)))
        return offset + spec.scale * radius
    if spec.oracle is not None:
        return float(spec.extent_hint or 0.0)
    assert spec.bitmap is not None
    rows, cols = spec.bitmap.shape
    ox, oy = spec.origin
    corners = [
        (ox, oy),
        (ox + cols * spec.pixel_size, oy),
        (ox, oy + rows * spec.pixel_size),
        (ox + cols * spec.pixel_size, oy + rows * spec.pixel_size),
    ]
    return max(math.hypot(x, y) for x, y in corners)


def membership(spec: ObstacleSpec, x: Any) -> Any:
    """
    Evaluate the indicator of the (closed) obstacle at one or many points.

    Args:
        spec: Obstacle description.
        x: A point ``(x, y)`` or an array of points with shape (..., 2).

    Returns:
        A bool for a single point, otherwise a bool array of shape (...).
    """
    points = np.asarray(x, dtype=float)
    single = points.ndim == 1
    pts = points.reshape(-1, 2)

    if spec.kind == "none":
        inside = np.zeros(len(pts), dtype=bool)
    elif spec.kind == "disk":
        cx, cy = spec.center
        inside = np.hypot(pts[:, 0] - cx, pts[:, 1] - cy) <= spec.radius
    elif spec.kind == "koch":
        poly = _koch_shape(spec.level, spec.scale, spec.center)
        inside = shapely.intersects_xy(poly, pts[:, 0], pts[:, 1])
    elif spec.kind == "julia":
        inside = _julia_bounded(spec, pts)
    elif spec.kind == "pixel-oracle":
        inside = _bitmap_membership(spec, pts)
    else:
        raise GeometryError(f"Unknown obstacle kind: {spec.kind}", "kind")

    inside = np.asarray(inside, dtype=bool)
    if single:
        return bool(inside[0])
    return inside.reshape(points.shape[:-1])


def _julia_bounded(spec: ObstacleSpec, pts: np.ndarray) -> np.ndarray:
    """Escape-time test: bounded iff |z_k| <= bailout for k = 0..max_iter."""
    cx, cy = spec.center
    z = ((pts[:, 0] - cx) + 1j * (pts[:, 1] - cy)) / spec.scale
    bounded = np.abs(z) <= spec.bailout
    active = bounded.copy()
    for _ in range(spec.max_iter):
        if not active.any():
            break
        z[active] = z[active] ** 2 + spec.c
        escaped = active & (np.abs(z) > spec.bailout)
        bounded[escaped] = False
        active &= ~escaped
    return bounded


def _bitmap_membership(spec: ObstacleSpec, pts: np.ndarray) -> np.ndarray:
    """Look points up in the bitmap or delegate to the callback."""
    if spec.oracle is not None:
        return np.asarray(spec.oracle(pts), dtype=bool)
    assert spec.bitmap is not None
    rows, cols = spec.bitmap.shape
    ox, oy = spec.origin
    col = np.floor((pts[:, 0] - ox) / spec.pixel_size).astype(np.int64)
    row = rows - 1 - np.floor((pts[:, 1] - oy) / spec.pixel_size).astype(np.int64)
    valid = (col >= 0) & (col < cols) & (row >= 0) & (row < rows)
    inside = np.zeros(len(pts), dtype=bool)
    inside[valid] = spec.bitmap[row[valid], col[valid]]
    return inside


@lru_cache(maxsize=16)
def _koch_shape(level: int, scale: float, center: tuple[float, float]) -> shapely.Polygon:
    """Prepared shapely polygon of a Koch prefractal."""
    from rough_resonance.geometry.polygons import koch_prefractal

    poly = shapely.Polygon(koch_prefractal(level, scale, center).vertices)
    shapely.prepare(poly)
    return poly


@lru_cache(maxsize=32)
def _load_bitmap_cached(path: str, mtime: float) -> np.ndarray:
    """
    Load a PGM/PNG bitmap with caching based on file modification time.

    Args:
        path: Path to the bitmap.
        mtime: File modification time (for cache invalidation).

    Returns:
        Boolean array, True where the pixel value is non-zero.
    """
    img = cv2.imread(path, cv2.IMREAD_GRAYSCALE)
    if img is None:
        raise GeometryError(f"Failed to load bitmap: {path}", "bitmap")
    return img > 0


def load_bitmap(path: str | Path) -> np.ndarray:
    """Load a bitmap obstacle (1 = inside) as a boolean array."""
    bitmap_path = Path(path).expanduser().resolve()
    if not bitmap_path.exists():
        raise FileNotFoundError(f"Bitmap file not found: {path}")
    return _load_bitmap_cached(str(bitmap_path), bitmap_path.stat().st_mtime)
