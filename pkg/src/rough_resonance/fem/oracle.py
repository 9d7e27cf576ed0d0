"""Closed-form interior Neumann-to-Dirichlet map for a centered disk obstacle."""

import numpy as np
from scipy import special

from rough_resonance.fem.assembly import FemError


class OracleDegeneracyError(FemError):
    """Raised when the radial Neumann problem is (numerically) singular."""

    def __init__(self, alpha: int, k: complex, denominator: complex) -> None:
        self.alpha = alpha
        self.k = k
        self.denominator = denominator
        super().__init__(
            f"Radial Neumann problem degenerate for alpha={alpha}, k={k} "
            f"(|rho'(X)| = {abs(denominator):.3e})"
        )


def disk_ntd_oracle(a: float, X: float, k: complex, alpha: int) -> complex:
    """
    Diagonal entry m_alpha(k) of the annulus Neumann-to-Dirichlet map.

    Solves rho'' + rho'/r + (k^2 - alpha^2/r^2) rho = 0 with rho(a) = 0 and
    rho'(X) = 1 using rho(r) = J(ka) Y(kr) - Y(ka) J(kr), and returns rho(X).

    Args:
        a: Obstacle radius.
        X: Interface radius, X > a.
        k: Wavenumber.
        alpha: Fourier mode (only |alpha| matters).

    Raises:
        FemError: If the radii are not ordered.
        OracleDegeneracyError: If |rho'(X)| is below 1e-14 of its scale.
    """
    if not 0 < a < X:
        raise FemError(f"Disk oracle needs 0 < a < X, got a={a}, X={X}")
    nu = abs(int(alpha))
    k = complex(k)
    ja, ya = special.jv(nu, k * a), special.yv(nu, k * a)
    jx, yx = special.jv(nu, k * X), special.yv(nu, k * X)
    djx, dyx = special.jvp(nu, k * X), special.yvp(nu, k * X)

    rho = ja * yx - ya * jx
    drho = k * (ja * dyx - ya * djx)
    scale = abs(k) * max(abs(ja), abs(ya)) * max(abs(djx), abs(dyx))
    if not np.isfinite(drho) or abs(drho) <= 1e-14 * scale:
        raise OracleDegeneracyError(int(alpha), k, complex(drho))
    return complex(rho / drho)
