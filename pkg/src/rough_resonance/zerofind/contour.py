"""Grids of log|det T_n(k)| over a search rectangle."""

import math
import time
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from rough_resonance.logging import get_logger
from rough_resonance.ntd import LogDet, ModelError, SpectralModel, eval_t, logdet
from rough_resonance.specfun import SpecialFunctionError
from rough_resonance.utils.parallel import parallel_map
from rough_resonance.utils.writers import write_csv
from rough_resonance.zerofind.rect import Rect, ZeroFindError

logger = get_logger("zerofind")

LogDetEvaluator = Callable[[complex], LogDet]

FLAG_OK = ""
FLAG_SINGULAR = "singular"


def det_evaluator(model: SpectralModel) -> LogDetEvaluator:
    """k -> logdet(T_n(k)) for a spectral model."""

    def evaluate(k: complex) -> LogDet:
        return logdet(eval_t(model, k))

    return evaluate


@dataclass(frozen=True, eq=False)
class ContourGrid:
    """
    Row-major grid of log|det| values; node (i, j) is re[i] + 1j * im[j].

    flags[i, j] is empty for a finite value, "singular" for an exact zero
    of the determinant, or the name of the exception raised at that node.
    """

    rect: Rect
    re: np.ndarray
    im: np.ndarray
    values: np.ndarray
    flags: np.ndarray
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.re), len(self.im))

    @property
    def n_flagged(self) -> int:
        return int(np.count_nonzero(self.flags != FLAG_OK))

    def node(self, i: int, j: int) -> complex:
        return complex(self.re[i], self.im[j])

    def rows(self) -> list[tuple[float, float, float]]:
        return [
            (float(self.re[i]), float(self.im[j]), float(self.values[i, j]))
            for i in range(len(self.re))
            for j in range(len(self.im))
        ]

    def to_csv(self, path: str | Path) -> Path:
        return write_csv(["re", "im", "logabs"], self.rows(), path)


def grid_nodes(rect: Rect, n_re: int, n_im: int) -> tuple[np.ndarray, np.ndarray]:
    return np.linspace(rect.re_min, rect.re_max, n_re), np.linspace(rect.im_min, rect.im_max, n_im)


def _evaluate_node(evaluate: LogDetEvaluator, k: complex) -> tuple[float, str]:
    try:
        result = evaluate(k)
    except (ModelError, SpecialFunctionError, ArithmeticError, np.linalg.LinAlgError) as e:
        logger.debug(f"Grid node {k} failed: {e}")
        return math.nan, type(e).__name__
    if result.is_singular:
        return result.log_abs, FLAG_SINGULAR
    return result.log_abs, FLAG_OK


def contour_grid(
    model: SpectralModel | LogDetEvaluator,
    rect: Rect,
    n_re: int,
    n_im: int,
    threads: int = 1,
) -> ContourGrid:
    """
    Evaluate log|det T_n(k)| at every node of an n_re x n_im grid.

    Node failures are recorded in the flags and never abort the grid.

    Raises:
        ZeroFindError: If the rectangle leaves the lower half plane or a
            resolution is below 2.
    """
    rect.require_lower_half_plane()
    if n_re < 2 or n_im < 2:
        raise ZeroFindError(f"Grid resolutions must be >= 2, got ({n_re}, {n_im})")
    evaluate = det_evaluator(model) if isinstance(model, SpectralModel) else model

    start = time.perf_counter()
    re, im = grid_nodes(rect, n_re, n_im)
    nodes = [complex(x, y) for x in re for y in im]
    results = parallel_map(lambda k: _evaluate_node(evaluate, k), nodes, threads)

    values = np.array([value for value, _ in results], dtype=float).reshape(n_re, n_im)
    flags = np.array([flag for _, flag in results], dtype=object).reshape(n_re, n_im)
    metadata: dict[str, Any] = {}
    if isinstance(model, SpectralModel):
        metadata = {"N": model.N, "J": model.J, "k0": model.k0, **model.metadata}
    grid = ContourGrid(rect=rect, re=re, im=im, values=values, flags=flags, metadata=metadata)
    logger.info(
        f"Contour grid {n_re}x{n_im}: {grid.n_flagged} flagged "
        f"({time.perf_counter() - start:.2f}s)"
    )
    return grid


def local_minima(grid: ContourGrid, percentile: float = 25.0) -> list[complex]:
    """
    Strict interior local minima (8-neighbourhood) below a value percentile.

    Returned in ascending order of value. Flagged nodes never qualify but a
    singular node counts as a minimum.
    """
    values = np.where(grid.flags == FLAG_OK, grid.values, np.nan)
    values = np.where(grid.flags == FLAG_SINGULAR, -np.inf, values)
    finite = values[np.isfinite(values)]
    if finite.size == 0 and not np.any(np.isneginf(values)):
        return []
    threshold = np.percentile(finite, percentile) if finite.size else np.inf

    padded = np.pad(values, 1, constant_values=np.nan)
    centre = padded[1:-1, 1:-1]
    is_min = np.ones_like(centre, dtype=bool)
    n_re, n_im = values.shape
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            neighbour = padded[1 + di : 1 + di + n_re, 1 + dj : 1 + dj + n_im]
            # NaN comparisons are False, so border and flagged neighbours disqualify
            is_min &= centre < neighbour
    is_min &= centre <= threshold

    found = [(float(values[i, j]), grid.node(i, j)) for i, j in np.argwhere(is_min)]
    found.sort(key=lambda item: (item[0], item[1].real, item[1].imag))
    return [k for _, k in found]
