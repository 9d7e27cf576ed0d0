"""Tests for obstacles, pixelation, polygons and set distances."""

import math

import numpy as np
import pytest

from rough_resonance.geometry import (
    GeometryError,
    ObstacleSpec,
    ResolutionOverflowError,
    ball_polygon,
    boundary_hausdorff,
    default_m_b,
    disk_polygon,
    extent,
    koch_prefractal,
    membership,
    obstacle_polygons,
    pixelate,
    set_distance,
    trace_pixel_boundary,
)


class TestObstacleSpec:
    """Tests for ObstacleSpec validation."""

    def test_default_disk_is_valid(self):
        """Test that the default disk fits inside X = 2 with margin."""
        assert ObstacleSpec().validate(2.0) == []

    def test_negative_radius(self):
        """Test that a non-positive radius is rejected with its field."""
        with pytest.raises(GeometryError, match="radius must be positive") as info:
            ObstacleSpec(kind="disk", radius=-0.1).validate()
        assert info.value.field_name == "radius"

    def test_unknown_kind(self):
        """Test that unknown kinds are rejected."""
        with pytest.raises(GeometryError, match="Unknown obstacle kind"):
            ObstacleSpec(kind="square").validate()  # type: ignore[arg-type]

    def test_koch_level_cap(self):
        """Test that Koch levels above the cap are rejected."""
        with pytest.raises(GeometryError, match="Koch level"):
            ObstacleSpec(kind="koch", level=9).validate()

    def test_obstacle_must_fit_interface(self):
        """Test that an obstacle reaching B_X(0) is an error."""
        with pytest.raises(GeometryError, match="does not fit"):
            ObstacleSpec(kind="disk", radius=1.2).validate(1.0)

    def test_margin_warning(self):
        """Test that leaving the B_(X-1) margin only warns."""
        warnings = ObstacleSpec(kind="disk", radius=0.5).validate(1.2)
        assert len(warnings) == 1
        assert "margin" in warnings[0]

    def test_julia_from_q(self):
        """Test the c = q(-1 + 0.2i) parametrization."""
        spec = ObstacleSpec.julia_from_q(0.5)
        assert spec.kind == "julia"
        assert spec.c == pytest.approx(complex(-0.5, 0.1))


class TestMembership:
    """Tests for membership oracles."""

    def test_disk_closed(self):
        """Test that the disk is closed and centred."""
        spec = ObstacleSpec(kind="disk", radius=0.5)
        assert membership(spec, (0.0, 0.0)) is True
        assert membership(spec, (0.5, 0.0)) is True
        assert membership(spec, (0.51, 0.0)) is False

    def test_vectorized_shape(self):
        """Test that arrays of points keep their leading shape."""
        spec = ObstacleSpec(kind="disk", radius=0.5)
        pts = np.zeros((3, 4, 2))
        assert membership(spec, pts).shape == (3, 4)

    def test_koch_level_zero_is_triangle(self):
        """Test the level-0 Koch obstacle against its triangle."""
        spec = ObstacleSpec(kind="koch", level=0, scale=0.5)
        assert membership(spec, (0.0, 0.0))
        assert membership(spec, (0.0, 0.49))
        assert not membership(spec, (0.4, 0.4))

    def test_julia_c_zero_is_scaled_disk(self):
        """Test that c = 0 gives the closed disk of radius scale."""
        spec = ObstacleSpec(kind="julia", c=0j, scale=0.5, max_iter=50)
        assert membership(spec, (0.49, 0.0))
        assert not membership(spec, (0.55, 0.0))

    def test_bitmap_oracle(self):
        """Test bitmap lookup with row 0 on top."""
        bitmap = np.array([[True, False], [False, False]])
        spec = ObstacleSpec(kind="pixel-oracle", bitmap=bitmap, pixel_size=0.1, origin=(0.0, 0.0))
        assert membership(spec, (0.05, 0.15))
        assert not membership(spec, (0.05, 0.05))
        assert not membership(spec, (0.5, 0.5))

    def test_none_is_empty(self):
        """Test that the empty obstacle contains nothing."""
        assert not membership(ObstacleSpec(kind="none"), (0.0, 0.0))


class TestExtent:
    """Tests for the extent bound."""

    def test_disk_extent(self):
        """Test the extent of an off-centre disk."""
        spec = ObstacleSpec(kind="disk", radius=0.25, center=(0.3, 0.4))
        assert extent(spec) == pytest.approx(0.75)

    def test_julia_extent_contains_set(self):
        """Test that the Julia escape bound contains the pixelated set."""
        spec = ObstacleSpec.julia_from_q(0.5)
        pixels = pixelate(spec, 32)
        radii = np.hypot(*pixels.centers.T)
        assert radii.max() <= extent(spec)


class TestPixelate:
    """Tests for pixelate and boundary tracing."""

    def test_disk_area_converges(self):
        """Test that the pixel area approaches the disk area."""
        spec = ObstacleSpec(kind="disk", radius=0.5)
        area = pixelate(spec, 64).area
        assert area == pytest.approx(math.pi / 4, abs=0.02)

    def test_single_component(self):
        """Test that a disk pixelates into one component."""
        pixels = pixelate(ObstacleSpec(kind="disk", radius=0.5), 16)
        assert pixels.components() == 1

    def test_invalid_resolution(self):
        """Test that n < 1 is rejected."""
        with pytest.raises(GeometryError, match="resolution"):
            pixelate(ObstacleSpec(), 0)

    def test_overflow(self):
        """Test the cell cap."""
        with pytest.raises(ResolutionOverflowError):
            pixelate(ObstacleSpec(), 1000, max_cells=100)

    def test_trace_single_cell(self):
        """Test that one cell traces to the square of side 1/n."""
        spec = ObstacleSpec(kind="disk", radius=0.01)
        pixels = pixelate(spec, 10)
        loops = trace_pixel_boundary(pixels)
        assert len(loops) == 1
        assert loops[0].is_ccw
        assert loops[0].area == pytest.approx(0.01)

    def test_trace_empty(self):
        """Test that tracing an empty set is an error."""
        with pytest.raises(GeometryError, match="empty"):
            trace_pixel_boundary(pixelate(ObstacleSpec(kind="none"), 4))

    def test_save_pgm(self, tmp_path):
        """Test the PGM export header."""
        pixels = pixelate(ObstacleSpec(kind="disk", radius=0.5), 8)
        path = pixels.save_pgm(tmp_path / "disk.pgm")
        assert path.read_bytes().startswith(b"P5")

    def test_boundary_hausdorff_decreases(self):
        """Test that the traced boundary approaches the circle."""
        spec = ObstacleSpec(kind="disk", radius=0.5)
        coarse = boundary_hausdorff(spec, 8)
        fine = boundary_hausdorff(spec, 32)
        assert fine < coarse
        assert fine <= 2.0 / 32


class TestPolygons:
    """Tests for interface and obstacle polygons."""

    def test_ball_polygon(self):
        """Test corner placement and sagitta."""
        interface = ball_polygon(1.0, 16)
        assert interface.m_b == 16
        assert np.allclose(np.hypot(*interface.corners.T), 1.0)
        assert interface.sagitta == pytest.approx(1.0 - math.cos(math.pi / 16))

    def test_ball_polygon_invalid(self):
        """Test that fewer than three corners are rejected."""
        with pytest.raises(GeometryError, match="m_b >= 3"):
            ball_polygon(1.0, 2)

    def test_default_m_b(self):
        """Test the default corner count."""
        assert default_m_b(1.0, 0.5) == 16
        assert default_m_b(1.0, 0.05) == math.ceil(2 * math.pi / 0.05)

    def test_koch_vertex_count(self):
        """Test 3 * 4^L vertices per level."""
        for level in range(4):
            assert len(koch_prefractal(level).vertices) == 3 * 4**level

    def test_koch_area_grows(self):
        """Test that each level adds area and stays simple."""
        areas = [koch_prefractal(level).area for level in range(4)]
        assert all(b > a for a, b in zip(areas, areas[1:]))
        assert koch_prefractal(3).is_simple()

    def test_disk_polygon_inscribed(self):
        """Test that disk polygon vertices lie on the circle."""
        poly = disk_polygon(0.5, (0.0, 0.0), 32)
        assert np.allclose(np.hypot(*poly.vertices.T), 0.5)

    def test_obstacle_polygons_kinds(self):
        """Test the loop counts per kind and approximation."""
        assert obstacle_polygons(ObstacleSpec(kind="none"), 16, 1.0) == []
        assert len(obstacle_polygons(ObstacleSpec(kind="koch", level=2), 16, 1.0)) == 1
        pixel_loops = obstacle_polygons(ObstacleSpec(), 16, 1.0, approximation="pixel")
        assert len(pixel_loops) == 1

    def test_unknown_approximation(self):
        """Test that unknown approximations are rejected."""
        with pytest.raises(GeometryError, match="approximation"):
            obstacle_polygons(ObstacleSpec(), 16, 1.0, approximation="spline")


class TestSetDistance:
    """Tests for Hausdorff and Attouch-Wets distances."""

    def test_hausdorff_points(self):
        """Test the Hausdorff distance of two small sets."""
        d = set_distance([0j, 1 + 0j], [0j], "hausdorff")
        assert d.value == pytest.approx(1.0)

    def test_identical_sets(self):
        """Test that identical sets are at distance zero."""
        pts = [0.1 - 0.2j, -0.3 - 0.5j]
        assert set_distance(pts, pts, "attouch-wets").value == pytest.approx(0.0, abs=1e-12)

    def test_attouch_wets_bounded_by_hausdorff(self):
        """Test d_AW <= min(1, d_H) on bounded sets."""
        a = [0.1 - 0.1j, 0.2 - 0.3j]
        b = [0.15 - 0.1j, 0.2 - 0.35j]
        d_h = set_distance(a, b, "hausdorff").value
        d_aw = set_distance(a, b, "attouch-wets")
        assert d_aw.value <= min(1.0, d_h) + d_aw.error_bound

    def test_empty_set(self):
        """Test that empty sets are rejected."""
        with pytest.raises(GeometryError, match="non-empty"):
            set_distance([], [0j])

    def test_unknown_metric(self):
        """Test that unknown metrics are rejected."""
        with pytest.raises(GeometryError, match="Unknown metric"):
            set_distance([0j], [0j], "euclid")  # type: ignore[arg-type]
