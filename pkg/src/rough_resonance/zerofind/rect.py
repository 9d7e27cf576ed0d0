"""Axis-aligned rectangles in the complex plane."""

import math
from dataclasses import dataclass

import numpy as np

LOWER_HALF_PLANE_MESSAGE = "search rectangle must lie in the lower half plane"


class ZeroFindError(Exception):
    """Base error for resonance location."""


@dataclass(frozen=True)
class Rect:
    """Closed box [re_min, re_max] x [im_min, im_max]."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self) -> None:
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ZeroFindError(
                f"Degenerate rectangle [{self.re_min}, {self.re_max}] x "
                f"[{self.im_min}, {self.im_max}]"
            )

    @classmethod
    def from_list(cls, values: list[float] | tuple[float, ...]) -> "Rect":
        if len(values) != 4:
            raise ZeroFindError(f"Rectangle needs 4 numbers, got {len(values)}")
        return cls(*(float(v) for v in values))

    def to_list(self) -> list[float]:
        return [self.re_min, self.re_max, self.im_min, self.im_max]

    @property
    def width(self) -> float:
        return self.re_max - self.re_min

    @property
    def height(self) -> float:
        return self.im_max - self.im_min

    @property
    def side(self) -> float:
        return max(self.width, self.height)

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    @property
    def in_lower_half_plane(self) -> bool:
        return self.im_max < 0

    def require_lower_half_plane(self) -> None:
        if not self.in_lower_half_plane:
            raise ZeroFindError(LOWER_HALF_PLANE_MESSAGE)

    def contains(self, z: complex) -> bool:
        return (
            self.re_min <= z.real <= self.re_max and self.im_min <= z.imag <= self.im_max
        )

    def distance(self, z: complex) -> float:
        """Euclidean distance from z to the closed box (0 inside)."""
        dx = max(self.re_min - z.real, 0.0, z.real - self.re_max)
        dy = max(self.im_min - z.imag, 0.0, z.imag - self.im_max)
        return math.hypot(dx, dy)

    def enlarge(self, margin: float) -> "Rect":
        return Rect(
            self.re_min - margin,
            self.re_max + margin,
            self.im_min - margin,
            self.im_max + margin,
        )

    def intersect(self, other: "Rect") -> "Rect | None":
        re_lo, re_hi = max(self.re_min, other.re_min), min(self.re_max, other.re_max)
        im_lo, im_hi = max(self.im_min, other.im_min), min(self.im_max, other.im_max)
        if re_lo >= re_hi or im_lo >= im_hi:
            return None
        return Rect(re_lo, re_hi, im_lo, im_hi)

    def corners(self) -> list[complex]:
        """Counter-clockwise from the lower-left corner."""
        return [
            complex(self.re_min, self.im_min),
            complex(self.re_max, self.im_min),
            complex(self.re_max, self.im_max),
            complex(self.re_min, self.im_max),
        ]

    def boundary_nodes(self, max_segment: float) -> np.ndarray:
        """
        Counter-clockwise closed polygon of nodes on the boundary.

        Every side is split into equal segments no longer than max_segment;
        the first node is repeated at the end.
        """
        corners = self.corners()
        nodes: list[np.ndarray] = []
        for a, b in zip(corners, corners[1:] + corners[:1], strict=True):
            count = max(1, math.ceil(abs(b - a) / max_segment))
            t = np.arange(count) / count
            nodes.append(a + (b - a) * t)
        ring = np.concatenate(nodes)
        return np.append(ring, ring[0])
