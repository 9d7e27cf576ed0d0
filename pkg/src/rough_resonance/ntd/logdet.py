"""Overflow-safe log-determinants of dense complex matrices."""

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg


@dataclass(frozen=True)
class LogDet:
    """det = exp(log_abs + i arg); arg in (-pi, pi]."""

    log_abs: float
    arg: float

    @property
    def is_singular(self) -> bool:
        return self.log_abs == -math.inf

    def value(self) -> complex:
        """The determinant itself (may under- or overflow)."""
        if self.is_singular:
            return 0j
        return cmath.exp(complex(self.log_abs, self.arg))

    def log(self) -> complex:
        return complex(self.log_abs, self.arg)


def wrap_angle(angle: float) -> float:
    """Map an angle into (-pi, pi]."""
    wrapped = math.remainder(angle, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


def logdet(m: np.ndarray) -> LogDet:
    """
    Log-determinant by LU with partial pivoting.

    log_abs sums log|u_ii|; arg sums the pivot arguments plus pi per row swap.
    A zero pivot yields log_abs = -inf and arg = 0.

    Raises:
        ValueError: If the matrix is not square.
    """
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"logdet needs a square matrix, got shape {a.shape}")
    if a.shape[0] == 0:
        return LogDet(0.0, 0.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a.astype(complex), check_finite=False)
    diag = np.diag(lu)
    if np.any(diag == 0):
        return LogDet(-math.inf, 0.0)
    swaps = int(np.count_nonzero(piv != np.arange(len(piv))))
    log_abs = float(np.sum(np.log(np.abs(diag))))
    arg = wrap_angle(float(np.sum(np.angle(diag))) + math.pi * swaps)
    return LogDet(log_abs=log_abs, arg=arg)
