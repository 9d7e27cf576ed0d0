"""
Certified zero localization by the argument principle.

Every box B of a tiling is tested on a family of enclosing boxes B_j whose
distance to B shrinks like C_B / j. On the boundary of B_j the function is
sampled at spacing 2^-j and the winding number is approximated by a
rectangle rule. The sampling error of that sum is bounded by

    D = sum_i (l_i / 2 pi) (e_i / (L_i - e_i) + e_i C_i / (L_i - e_i)^2),
    e_i = l_i C_i,

where l_i is the segment length, L_i the sampled |g| and C_i a bound on
|g| + |g'| + |g''| near the segment. Once D < 1/2 the rounded winding
number counts the zeros inside B_j exactly, given valid bounds.
"""

import math
import time
from dataclasses import dataclass, field
from typing import Any, Literal, Protocol

import numpy as np
from scipy import special
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from rough_resonance.geometry.distance import Metric, SetDistance, set_distance
from rough_resonance.logging import get_logger
from rough_resonance.ntd import ModelError, SpectralModel, eval_t, logdet
from rough_resonance.specfun import SpecialFunctionError
from rough_resonance.utils.parallel import parallel_map
from rough_resonance.zerofind.rect import Rect, ZeroFindError

logger = get_logger("zerofind")

Decision = Literal["zero", "clear", "inconclusive"]

MAX_BOUNDARY_SAMPLES = 2**16
J_STEPS = 16
BOUND_SAFETY = 2.0


class CertificationInconclusiveError(ZeroFindError):
    """Raised when the error bound cannot be pushed below 1/2."""

    def __init__(self, box: Rect, j: int, D: float) -> None:
        self.box = box
        self.j = j
        self.D = D
        super().__init__(f"Certification of box {box.to_list()} inconclusive at j={j} (D={D:.3g})")


# =============================================================================
# Evaluators
# =============================================================================


class AnalyticEvaluator(Protocol):
    """
    Vectorized g, g', g'' on arrays of points.

    ``rigorous`` states whether the sampled derivative bound is a true bound
    on every segment (exact only for polynomials of degree <= 1).
    """

    rigorous: bool

    def __call__(self, k: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]: ...


@dataclass(frozen=True)
class AffineEvaluator:
    """g(k) = slope * (k - z0)."""

    z0: complex
    slope: complex = 1.0
    rigorous: bool = True

    def __call__(self, k: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        k = np.asarray(k, dtype=complex)
        return self.slope * (k - self.z0), np.full_like(k, self.slope), np.zeros_like(k)


@dataclass(frozen=True)
class HankelEvaluator:
    """g(k) = H^(1)_order(scale * k); order 1 and scale 1/2 give the radius-1/2 disk resonances."""

    order: int = 1
    scale: float = 0.5
    rigorous: bool = False

    def __call__(self, k: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        z = self.scale * np.asarray(k, dtype=complex)
        value = special.hankel1(self.order, z)
        first = self.scale * special.h1vp(self.order, z, 1)
        second = self.scale**2 * special.h1vp(self.order, z, 2)
        return value, first, second


@dataclass(frozen=True, eq=False)
class ModelEvaluator:
    """
    g(k) = det T_n(k) with derivatives from central differences of determinant ratios.
    """

    model: SpectralModel
    step: float = 1.0e-4
    rigorous: bool = False

    def _point(self, k: complex) -> tuple[complex, complex, complex]:
        h = self.step * (1.0 + abs(k))
        centre = logdet(eval_t(self.model, k))
        if centre.is_singular:
            return 0j, complex("nan"), complex("nan")
        base = centre.log()
        plus = np.exp(logdet(eval_t(self.model, k + h)).log() - base)
        minus = np.exp(logdet(eval_t(self.model, k - h)).log() - base)
        g = centre.value()
        return g, g * (plus - minus) / (2.0 * h), g * (plus - 2.0 + minus) / h**2

    def __call__(self, k: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        points = np.atleast_1d(np.asarray(k, dtype=complex))
        rows = np.array([self._point(complex(z)) for z in points], dtype=complex)
        return rows[:, 0], rows[:, 1], rows[:, 2]


# =============================================================================
# Single box
# =============================================================================


@dataclass(frozen=True)
class BoxDecision:
    """
    Record of one box test.

    winding is the rectangle-rule value of (1/2 pi i) of the contour
    integral of g'/g over the boundary of the enclosing box at level j;
    L is the smallest sampled |g| there and D the error bound.
    """

    box: Rect
    decision: Decision
    j: int
    margin: float
    L: float
    D: float
    winding: complex
    samples: int
    rigorous: bool
    detail: str = ""

    @property
    def has_zero(self) -> bool:
        return self.decision == "zero"


def _boundary_error(
    evaluate: AnalyticEvaluator, nodes: np.ndarray
) -> tuple[float, float, complex]:
    """(D, L, winding) for a closed counter-clockwise node ring."""
    a, b = nodes[:-1], nodes[1:]
    mid = 0.5 * (a + b)
    dk = b - a
    ell = np.abs(dk)

    g_a, d1_a, d2_a = evaluate(a)
    g_m, d1_m, d2_m = evaluate(mid)
    size_a = np.abs(g_a) + np.abs(d1_a) + np.abs(d2_a)
    size_m = np.abs(g_m) + np.abs(d1_m) + np.abs(d2_m)
    size_b = np.roll(size_a, -1)
    C = BOUND_SAFETY * np.maximum(np.maximum(size_a, size_b), size_m)

    L = np.abs(g_m)
    if not (np.all(np.isfinite(C)) and np.all(np.isfinite(L))):
        return math.inf, float(np.nanmin(L)) if L.size else 0.0, complex("nan")
    e = ell * C
    margin = L - e
    if np.any(margin <= 0):
        return math.inf, float(L.min()), complex("nan")
    D = float(np.sum(ell / (2.0 * math.pi) * (e / margin + e * C / margin**2)))
    winding = complex(np.sum(d1_m / g_m * dk) / (2j * math.pi))
    return D, float(L.min()), winding


def certify_box(
    g: AnalyticEvaluator,
    box: Rect,
    n: int,
    j_start: int | None = None,
    max_samples: int = MAX_BOUNDARY_SAMPLES,
    strict: bool = False,
) -> BoxDecision:
    """
    Decide whether g has a zero within distance 2^-n of a box.

    The enclosing boxes B_j are B enlarged by C_B / j with C_B = side / 4.
    j grows until D < 1/2 and every point of B_j is within 2^-n of B.
    "zero" is returned when the winding number exceeds 1/2 (a zero in B_j,
    hence within 2^-n of B) and "clear" otherwise (no zero in B_j, hence none in B).

    Args:
        g: Evaluator.
        box: Closed box in the lower half plane.
        n: Resolution parameter.
        j_start: First level; defaults to ceil(log2(1/side)) + 3.
        max_samples: Boundary sample cap.
        strict: Raise instead of returning an "inconclusive" record.

    Raises:
        ZeroFindError: If the box leaves the lower half plane.
        CertificationInconclusiveError: When strict and D stays >= 1/2.
    """
    box.require_lower_half_plane()
    C_B = box.side / 4.0
    if j_start is None:
        j_start = max(1, math.ceil(math.log2(1.0 / box.side)) + 3)
    tolerance = 2.0**-n

    j = j_start
    D, L, winding, samples = math.inf, 0.0, complex("nan"), 0
    margin = C_B / j
    for j in range(j_start, j_start + J_STEPS):
        margin = C_B / j
        enclosing = box.enlarge(margin)
        if not enclosing.in_lower_half_plane:
            break
        nodes = enclosing.boundary_nodes(2.0**-j)
        samples = 2 * (len(nodes) - 1)
        if samples > max_samples:
            break
        D, L, winding = _boundary_error(g, nodes)
        if D < 0.5 and math.sqrt(2.0) * margin < tolerance:
            decision: Decision = "zero" if winding.real > 0.5 else "clear"
            return BoxDecision(
                box=box,
                decision=decision,
                j=j,
                margin=margin,
                L=L,
                D=D,
                winding=winding,
                samples=samples,
                rigorous=g.rigorous,
            )

    if strict:
        raise CertificationInconclusiveError(box, j, D)
    return BoxDecision(
        box=box,
        decision="inconclusive",
        j=j,
        margin=margin,
        L=L,
        D=D,
        winding=winding,
        samples=samples,
        rigorous=g.rigorous,
        detail="error bound did not drop below 1/2",
    )


# =============================================================================
# Tiling
# =============================================================================


def certification_domain(n: int) -> Rect:
    """The box |Re k| <= 2^n, 2^-n <= -Im k <= 2^n."""
    return Rect(-(2.0**n), 2.0**n, -(2.0**n), -(2.0**-n))


def tile(domain: Rect, side: float) -> list[tuple[int, int, Rect]]:
    """Squares of the given side covering the domain, clipped at its edges."""
    n_re = max(1, math.ceil(domain.width / side - 1e-12))
    n_im = max(1, math.ceil(domain.height / side - 1e-12))
    tiles = []
    for i in range(n_re):
        re_lo = domain.re_min + i * side
        re_hi = min(domain.re_max, re_lo + side)
        for j in range(n_im):
            im_lo = domain.im_min + j * side
            im_hi = min(domain.im_max, im_lo + side)
            tiles.append((i, j, Rect(re_lo, re_hi, im_lo, im_hi)))
    return tiles


@dataclass(frozen=True)
class CertifiedRegion:
    """
    Boxes of side <= 2^-n / sqrt(2) (diameter <= 2^-n) flagged as holding
    or touching a zero.

    Every kept box lies within 2^-n of a zero, and every zero in the domain
    lies in a kept box, so the kept union is within ``hausdorff_bound`` of
    the zero set in the domain.
    """

    n: int
    domain: Rect
    side: float
    kept: list[BoxDecision]
    inconclusive: list[BoxDecision]
    n_boxes: int
    clusters: list[list[int]] = field(default_factory=list)
    rigorous: bool = False

    @property
    def complete(self) -> bool:
        return not self.inconclusive

    @property
    def hausdorff_bound(self) -> float:
        return 2.0**-self.n + math.sqrt(2.0) * self.side

    def cluster_centres(self) -> list[complex]:
        return [
            complex(np.mean([self.kept[i].box.center for i in members]))
            for members in self.clusters
        ]

    def sample_points(self) -> np.ndarray:
        """Corners and centres of the kept boxes."""
        points = []
        for record in self.kept:
            points.extend(record.box.corners())
            points.append(record.box.center)
        return np.asarray(points, dtype=complex)

    def distance_to(self, zeros: list[complex], metric: Metric = "attouch-wets") -> SetDistance:
        """Distance between the kept boxes (sampled) and a reference zero set."""
        return set_distance(self.sample_points(), np.asarray(zeros, dtype=complex), metric)

    def to_dict(self) -> dict[str, Any]:
        def record(d: BoxDecision) -> dict[str, Any]:
            return {
                "box": d.box.to_list(),
                "decision": d.decision,
                "j": d.j,
                "L": d.L,
                "D": d.D,
                "winding": d.winding,
                "samples": d.samples,
            }

        return {
            "n": self.n,
            "domain": self.domain.to_list(),
            "side": self.side,
            "n_boxes": self.n_boxes,
            "complete": self.complete,
            "bound_provider": "exact" if self.rigorous else "heuristic",
            "hausdorff_bound": self.hausdorff_bound,
            "aw_bound": min(1.0, self.hausdorff_bound),
            "clusters": [
                {"boxes": members, "centre": centre}
                for members, centre in zip(self.clusters, self.cluster_centres(), strict=True)
            ],
            "kept": [record(d) for d in self.kept],
            "inconclusive": [record(d) for d in self.inconclusive],
        }


def _cluster(indices: list[tuple[int, int]]) -> list[list[int]]:
    """Connected components of grid cells touching by edge or corner."""
    if not indices:
        return []
    lookup = {cell: pos for pos, cell in enumerate(indices)}
    rows, cols = [], []
    for pos, (i, j) in enumerate(indices):
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                other = lookup.get((i + di, j + dj))
                if other is not None:
                    rows.append(pos)
                    cols.append(other)
    size = len(indices)
    graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(size, size)).tocsr()
    count, labels = connected_components(graph, directed=False)
    return [sorted(np.flatnonzero(labels == c).tolist()) for c in range(count)]


def zero_boxes(
    g: AnalyticEvaluator,
    n: int,
    region: Rect | None = None,
    threads: int = 1,
) -> CertifiedRegion:
    """
    Cover the zeros of g in the certification domain (intersected with
    ``region``) by boxes of diameter <= 2^-n.

    Boxes whose test is inconclusive or raises are collected separately and
    make the certificate incomplete; the kept boxes are still returned.

    Raises:
        ZeroFindError: If n < 1 or the region misses the domain.
    """
    if n < 1:
        raise ZeroFindError(f"Resolution n must be >= 1, got {n}")
    domain = certification_domain(n)
    if region is not None:
        region.require_lower_half_plane()
        clipped = domain.intersect(region)
        if clipped is None:
            raise ZeroFindError(f"Region {region.to_list()} misses the certification domain")
        domain = clipped

    start = time.perf_counter()
    side = 2.0**-n / math.sqrt(2.0)
    tiles = tile(domain, side)

    def run(item: tuple[int, int, Rect]) -> BoxDecision:
        _, _, box = item
        try:
            return certify_box(g, box, n)
        except (ModelError, SpecialFunctionError, ArithmeticError, np.linalg.LinAlgError) as e:
            return BoxDecision(
                box=box,
                decision="inconclusive",
                j=0,
                margin=0.0,
                L=math.nan,
                D=math.inf,
                winding=complex("nan"),
                samples=0,
                rigorous=g.rigorous,
                detail=f"{type(e).__name__}: {e}",
            )

    decisions = parallel_map(run, tiles, threads)
    kept_idx = [pos for pos, d in enumerate(decisions) if d.decision == "zero"]
    kept = [decisions[pos] for pos in kept_idx]
    inconclusive = [d for d in decisions if d.decision == "inconclusive"]
    clusters = _cluster([(tiles[pos][0], tiles[pos][1]) for pos in kept_idx])

    result = CertifiedRegion(
        n=n,
        domain=domain,
        side=side,
        kept=kept,
        inconclusive=inconclusive,
        n_boxes=len(tiles),
        clusters=clusters,
        rigorous=g.rigorous,
    )
    logger.info(
        f"zero_boxes n={n}: {len(tiles)} boxes, {len(kept)} kept in {len(clusters)} clusters, "
        f"{len(inconclusive)} inconclusive ({time.perf_counter() - start:.2f}s)"
    )
    if inconclusive:
        logger.warning(f"Certificate incomplete: {len(inconclusive)} inconclusive boxes")
    return result
