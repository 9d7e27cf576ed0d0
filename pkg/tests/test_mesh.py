"""Tests for mesh construction, quality, text format and interface pairing."""

import math

import numpy as np
import pytest

from rough_resonance.geometry import ObstacleSpec, ball_polygon, disk_polygon, koch_prefractal
from rough_resonance.mesh import (
    DIRICHLET,
    INTERFACE,
    MeshError,
    MeshGeometryError,
    MeshParseError,
    MeshQualityError,
    boundary_pairing,
    build_mesh,
    expected_area,
    export_mesh,
    import_mesh,
    interpolant_matrix,
    load_mesh,
    mesh_quality,
    pairing_matrix,
    save_mesh,
    triangle_switches,
)

from .helpers import make_mesh


class TestBuildMesh:
    """Tests for build_mesh."""

    def test_disk_mesh_size_and_quality(self, disk_mesh):
        """Test that h and the shape constant respect their targets."""
        quality = mesh_quality(disk_mesh)
        assert quality.h <= 0.2
        assert quality.C_theta <= 4.0
        assert quality.d_n == disk_mesh.d_n

    def test_area_matches_domain(self, disk_mesh):
        """Test that the triangles tile the interface polygon minus the obstacle."""
        interface = ball_polygon(1.0, 32)
        loops = [disk_polygon(0.5, (0.0, 0.0), 16)]
        assert disk_mesh.area == pytest.approx(expected_area(loops, interface), rel=1e-10)

    def test_vertex_tags(self, disk_mesh):
        """Test that Dirichlet vertices lie on the obstacle and interface vertices on B_X."""
        r = np.hypot(*disk_mesh.vertices.T)
        dirichlet = disk_mesh.tags == DIRICHLET
        interface = disk_mesh.tags == INTERFACE
        assert dirichlet.any() and interface.any()
        assert np.all(r[dirichlet] <= 0.5 + 1e-12)
        assert np.all(r[dirichlet] >= 0.5 * math.cos(math.pi / 16) - 1e-12)
        assert np.all(r[interface] <= 1.0 + 1e-12)
        assert np.all(r[interface] >= math.cos(math.pi / 32) - 1e-12)

    def test_free_vertices(self, disk_mesh):
        """Test that d_n counts the non-Dirichlet vertices."""
        assert disk_mesh.d_n == int(np.count_nonzero(disk_mesh.tags != DIRICHLET))

    def test_empty_obstacle_has_no_dirichlet(self, empty_mesh):
        """Test the pure Neumann mesh."""
        assert not np.any(empty_mesh.tags == DIRICHLET)
        assert empty_mesh.d_n == empty_mesh.n_vertices

    def test_koch_mesh(self):
        """Test that a Koch prefractal meshes within the quality cap."""
        mesh = make_mesh(ObstacleSpec(kind="koch", level=2, scale=0.5), 0.15)
        assert mesh_quality(mesh).C_theta <= 4.0
        loops = [koch_prefractal(2, 0.5)]
        interface = ball_polygon(1.0, mesh.edge_chords.max() + 1)
        assert mesh.area == pytest.approx(expected_area(loops, interface), rel=1e-10)

    def test_invalid_h(self):
        """Test that a non-positive target is rejected."""
        with pytest.raises(MeshQualityError, match="h_target must be positive"):
            build_mesh([], ball_polygon(1.0, 16), 0.0)

    def test_small_area_switch_is_fixed_point(self):
        """Test that tiny area bounds are passed to Triangle without an exponent."""
        switches = triangle_switches(0.4 * 0.005**2)
        bound = switches.split("a")[1].rstrip("Q")
        assert "e" not in bound
        assert float(bound) == pytest.approx(1.0e-5)
        with pytest.raises(MeshError, match="positive"):
            triangle_switches(0.0)

    @pytest.mark.slow
    @pytest.mark.parametrize("h", [0.02, 0.01])
    def test_fine_disk_mesh_reaches_target(self, h):
        """Test that fine disk meshes meet h_target and the shape cap."""
        quality = mesh_quality(make_mesh(ObstacleSpec(kind="disk", radius=0.5), h))
        assert quality.h <= h
        assert quality.C_theta <= 4.0

    def test_obstacle_reaching_interface(self):
        """Test that an obstacle crossing the interface polygon is rejected."""
        loops = [disk_polygon(0.99, (0.0, 0.0), 64)]
        with pytest.raises(MeshGeometryError, match="interface"):
            build_mesh(loops, ball_polygon(1.0, 16), 0.2)


class TestMeshText:
    """Tests for the plain-text mesh format."""

    def test_round_trip(self, disk_mesh):
        """Test that export followed by import reproduces the mesh."""
        again = import_mesh(export_mesh(disk_mesh))
        assert np.array_equal(again.vertices, disk_mesh.vertices)
        assert np.array_equal(again.triangles, disk_mesh.triangles)
        assert np.array_equal(again.tags, disk_mesh.tags)
        assert np.array_equal(again.interface_edges, disk_mesh.interface_edges)

    def test_save_and_load(self, disk_mesh, tmp_path):
        """Test file persistence."""
        path = save_mesh(disk_mesh, tmp_path / "mesh.txt")
        assert load_mesh(path).n_triangles == disk_mesh.n_triangles

    def test_header_line(self, disk_mesh):
        """Test the header layout."""
        first = export_mesh(disk_mesh).splitlines()[0]
        assert first == f"mesh2d {disk_mesh.n_vertices} {disk_mesh.n_triangles}"

    def test_missing_header(self):
        """Test that text without the header is rejected."""
        with pytest.raises(MeshParseError, match="mesh2d"):
            import_mesh("grid 0 0\n")

    def test_unknown_tag(self):
        """Test that an unknown vertex tag reports its line."""
        text = "mesh2d 1 0\n0 0 q\nedges 0\n"
        with pytest.raises(MeshParseError, match="line 2"):
            import_mesh(text, validate=False)

    def test_truncated_text(self):
        """Test that missing vertex lines are reported."""
        with pytest.raises(MeshParseError, match="Unexpected end"):
            import_mesh("mesh2d 3 1\n0 0 i\n", validate=False)


class TestPairing:
    """Tests for the interpolated Fourier basis on the interface."""

    def test_constant_mode_total(self, disk_mesh):
        """Test that the pairing weights of e_0 sum to its integral."""
        weights = pairing_matrix(disk_mesh, 0)[:, 0]
        total = disk_mesh.interface_length() / math.sqrt(2.0 * math.pi * disk_mesh.X)
        assert weights.sum() == pytest.approx(total, rel=1e-12)

    def test_interpolant_at_corners(self, disk_mesh):
        """Test that corners carry the exact basis value."""
        F = interpolant_matrix(disk_mesh, 3)
        corner = int(disk_mesh.edge_chords[0, 0])
        theta = math.atan2(*disk_mesh.vertices[corner][::-1])
        expected = np.exp(3j * theta) / math.sqrt(2.0 * math.pi * disk_mesh.X)
        assert F[corner, 6] == pytest.approx(expected)

    def test_interior_rows_vanish(self, disk_mesh):
        """Test that loads only touch interface vertices."""
        B = pairing_matrix(disk_mesh, 2)
        interior = disk_mesh.tags != INTERFACE
        assert np.all(B[interior] == 0)

    def test_conjugate_modes(self, disk_mesh):
        """Test that e_-alpha is the conjugate of e_alpha."""
        B = pairing_matrix(disk_mesh, 4)
        assert np.allclose(B[:, 0], B[:, 8].conj())

    def test_boundary_pairing(self, disk_mesh):
        """Test the single-mode view against the matrix."""
        pairing = boundary_pairing(disk_mesh, -2)
        B = pairing_matrix(disk_mesh, 2)
        assert np.allclose(pairing.weights, B[pairing.vertex_ids, 0])
