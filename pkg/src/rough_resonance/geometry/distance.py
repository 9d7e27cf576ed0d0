"""Set distances between finite point sets and the Hausdorff boundary diagnostic."""

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import directed_hausdorff

from rough_resonance.geometry.obstacle import GeometryError, ObstacleSpec
from rough_resonance.geometry.pixels import pixelate, trace_pixel_boundary
from rough_resonance.geometry.polygons import Polygon, koch_prefractal

Metric = Literal["hausdorff", "attouch-wets"]

# Grid nodes per axis for one Attouch-Wets term
AW_GRID_CAP = 400


@dataclass(frozen=True)
class SetDistance:
    """Distance value with the bound on its approximation error."""

    value: float
    metric: str
    error_bound: float = 0.0
    terms: tuple[float, ...] = ()

    def __float__(self) -> float:
        return self.value


def as_points(values: np.ndarray | list) -> np.ndarray:
    """Accept complex numbers or (m, 2) coordinates and return (m, 2) floats."""
    arr = np.asarray(values)
    if np.iscomplexobj(arr):
        flat = arr.ravel()
        return np.column_stack([flat.real, flat.imag]).astype(float)
    return arr.astype(float).reshape(-1, 2)


def hausdorff(A: np.ndarray, B: np.ndarray) -> float:
    """Symmetric Hausdorff distance between finite point sets."""
    return max(directed_hausdorff(A, B)[0], directed_hausdorff(B, A)[0])


def set_distance(
    A: np.ndarray | list,
    B: np.ndarray | list,
    metric: Metric = "hausdorff",
    K_max: int = 20,
    pitch: float | None = None,
) -> SetDistance:
    """
    Distance between two non-empty finite point sets.

    The Attouch-Wets distance is sum_k 2^-k min(1, sup_{|x|<k} |d(x,A) - d(x,B)|),
    truncated after K_max terms. Each inner sup is taken over a grid of the
    ball together with the points of A and B inside it. Once the ball holds
    every point the sup equals the Hausdorff distance and no grid is needed.

    Args:
        A: First set (complex values or (m, 2) coordinates).
        B: Second set.
        metric: "hausdorff" or "attouch-wets".
        K_max: Number of Attouch-Wets terms.
        pitch: Grid pitch; defaults to 2^(-K_max/2).

    Returns:
        SetDistance with the value and the truncation/grid error bound.

    Raises:
        GeometryError: If either set is empty or the metric is unknown.
    """
    pa = as_points(A)
    pb = as_points(B)
    if len(pa) == 0 or len(pb) == 0:
        raise GeometryError("set_distance needs non-empty point sets", "A" if len(pa) == 0 else "B")

    d_h = hausdorff(pa, pb)
    if metric == "hausdorff":
        return SetDistance(value=d_h, metric=metric)
    if metric != "attouch-wets":
        raise GeometryError(f"Unknown metric: {metric}", "metric")

    if pitch is None:
        pitch = 2.0 ** (-K_max / 2)
    tree_a = cKDTree(pa)
    tree_b = cKDTree(pb)
    both = np.vstack([pa, pb])
    reach = float(np.max(np.hypot(both[:, 0], both[:, 1])))

    terms: list[float] = []
    total = 0.0
    bound = 2.0**-K_max
    for k in range(1, K_max + 1):
        if reach < k:
            sup = d_h
        else:
            step = max(pitch, 2.0 * k / AW_GRID_CAP)
            axis = np.arange(-k, k + step / 2, step)
            gx, gy = np.meshgrid(axis, axis, indexing="ij")
            grid = np.column_stack([gx.ravel(), gy.ravel()])
            grid = grid[np.hypot(grid[:, 0], grid[:, 1]) < k]
            near = both[np.hypot(both[:, 0], both[:, 1]) < k]
            samples = np.vstack([grid, near])
            da, _ = tree_a.query(samples)
            db, _ = tree_b.query(samples)
            sup = float(np.max(np.abs(da - db))) if len(samples) else 0.0
            # |d_A - d_B| is 2-Lipschitz; grid covers the ball to step/sqrt(2)
            bound += 2.0**-k * min(1.0, math.sqrt(2.0) * step)
        term = min(1.0, sup)
        terms.append(term)
        total += 2.0**-k * term
    return SetDistance(value=total, metric=metric, error_bound=bound, terms=tuple(terms))


def polygon_samples(loops: list[Polygon], spacing: float) -> np.ndarray:
    """Points along polygon edges with at most the given spacing."""
    chunks = []
    for loop in loops:
        for a, b in loop.edges():
            count = max(1, math.ceil(float(np.hypot(*(b - a))) / spacing))
            t = np.arange(count)[:, None] / count
            chunks.append(a + t * (b - a))
    return np.vstack(chunks)


def boundary_samples(spec: ObstacleSpec, spacing: float) -> np.ndarray:
    """
    Dense sampling of the exact obstacle boundary.

    Raises:
        GeometryError: For obstacle kinds without an explicit boundary.
    """
    if spec.kind == "disk":
        count = max(64, math.ceil(2.0 * math.pi * spec.radius / spacing))
        theta = 2.0 * np.pi * np.arange(count) / count
        cx, cy = spec.center
        return np.column_stack([cx + spec.radius * np.cos(theta), cy + spec.radius * np.sin(theta)])
    if spec.kind == "koch":
        return polygon_samples([koch_prefractal(spec.level, spec.scale, spec.center)], spacing)
    raise GeometryError(f"No explicit boundary for obstacle kind {spec.kind}", "kind")


def boundary_hausdorff(spec: ObstacleSpec, n: int, spacing: float | None = None) -> float:
    """Hausdorff distance between the traced pixel boundary at resolution n and the true one."""
    if spacing is None:
        spacing = 1.0 / (16.0 * n)
    loops = trace_pixel_boundary(pixelate(spec, n))
    return hausdorff(polygon_samples(loops, spacing), boundary_samples(spec, spacing))
