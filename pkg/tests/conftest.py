"""Shared fixtures: coarse meshes and models that keep the suite fast."""

import pytest

from rough_resonance.geometry import ObstacleSpec
from rough_resonance.mesh import TriMesh
from rough_resonance.ntd import SpectralModel, build_model

from .helpers import DISK, make_mesh


@pytest.fixture(scope="session")
def disk_mesh() -> TriMesh:
    """Radius-1/2 disk inside the unit interface polygon, h = 0.2."""
    return make_mesh(DISK, 0.2)


@pytest.fixture(scope="session")
def empty_mesh() -> TriMesh:
    """Interface polygon without an obstacle, h = 0.25."""
    return make_mesh(ObstacleSpec(kind="none"), 0.25)


@pytest.fixture(scope="session")
def disk_model(disk_mesh: TriMesh) -> SpectralModel:
    return build_model(disk_mesh, complex(-1.0, -1.0), 6, min(60, disk_mesh.d_n))


@pytest.fixture
def disk_config_text(tmp_path) -> str:
    """TOML run configuration for the coarse disk."""
    return f"""
[obstacle]
kind = "disk"
radius = 0.5

[discretization]
h_target = 0.2
N = 6
J = 60

[task]
rect = [-1.2, -0.5, -1.5, -0.8]
resolution = [8, 8]
seeds = [[-0.8, -1.1]]
h_values = [0.2, 0.15]

[output]
directory = "{tmp_path / 'results'}"

[runtime]
cache = false
"""
