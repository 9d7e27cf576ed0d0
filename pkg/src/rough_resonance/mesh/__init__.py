"""Triangulation of the inner domain and interface pairings."""

from rough_resonance.mesh.builder import build_mesh, expected_area, triangle_switches
from rough_resonance.mesh.pairing import (
    BoundaryBasisPairing,
    boundary_pairing,
    interpolant_matrix,
    pairing_matrix,
)
from rough_resonance.mesh.textio import (
    MeshParseError,
    export_mesh,
    import_mesh,
    load_mesh,
    save_mesh,
)
from rough_resonance.mesh.trimesh import (
    DIRICHLET,
    INTERFACE,
    INTERIOR,
    MeshError,
    MeshGeometryError,
    MeshQuality,
    MeshQualityError,
    MeshValidationError,
    TriMesh,
    mesh_quality,
    validate_mesh,
)

__all__ = [
    "DIRICHLET",
    "INTERFACE",
    "INTERIOR",
    "BoundaryBasisPairing",
    "MeshError",
    "MeshGeometryError",
    "MeshParseError",
    "MeshQuality",
    "MeshQualityError",
    "MeshValidationError",
    "TriMesh",
    "boundary_pairing",
    "build_mesh",
    "expected_area",
    "export_mesh",
    "import_mesh",
    "interpolant_matrix",
    "load_mesh",
    "mesh_quality",
    "pairing_matrix",
    "save_mesh",
    "triangle_switches",
    "validate_mesh",
]
