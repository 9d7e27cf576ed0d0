"""Mesh builders and reference values shared by the tests."""

from rough_resonance.geometry import ObstacleSpec, ball_polygon, default_m_b, obstacle_polygons
from rough_resonance.mesh import TriMesh, build_mesh

# Lowest resonance of the sound-soft disk of radius 1/2: H^(1)_1(k/2) = 0, modes alpha = +-1
K_EXACT = complex(-0.838549208188362, -1.154799048234411)

DISK = ObstacleSpec(kind="disk", radius=0.5)


def make_mesh(spec: ObstacleSpec, h: float, X: float = 1.0) -> TriMesh:
    """Mesh the obstacle the way the pipeline does, with default m_b."""
    loops = obstacle_polygons(spec, 64, X, h_target=h)
    return build_mesh(loops, ball_polygon(X, default_m_b(X, h)), h)
