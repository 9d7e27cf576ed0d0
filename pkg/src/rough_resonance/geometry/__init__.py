"""Obstacles, pixelations, polygons and set distances."""

from rough_resonance.geometry.distance import (
    SetDistance,
    boundary_hausdorff,
    hausdorff,
    set_distance,
)
from rough_resonance.geometry.obstacle import (
    OBSTACLE_KINDS,
    GeometryError,
    ObstacleSpec,
    extent,
    load_bitmap,
    membership,
)
from rough_resonance.geometry.pixels import (
    PixelSet,
    ResolutionOverflowError,
    pixelate,
    trace_pixel_boundary,
)
from rough_resonance.geometry.polygons import (
    InterfacePolygon,
    Polygon,
    ball_polygon,
    default_m_b,
    disk_polygon,
    koch_prefractal,
    obstacle_polygons,
)

__all__ = [
    "OBSTACLE_KINDS",
    "GeometryError",
    "InterfacePolygon",
    "ObstacleSpec",
    "PixelSet",
    "Polygon",
    "ResolutionOverflowError",
    "SetDistance",
    "ball_polygon",
    "boundary_hausdorff",
    "default_m_b",
    "disk_polygon",
    "extent",
    "hausdorff",
    "koch_prefractal",
    "load_bitmap",
    "membership",
    "obstacle_polygons",
    "pixelate",
    "set_distance",
    "trace_pixel_boundary",
]
