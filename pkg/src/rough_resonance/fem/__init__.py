"""P1 finite elements on the inner domain."""

from rough_resonance.fem.assembly import (
    FemError,
    FemSystem,
    assemble,
    assemble_global,
    dump_coordinate_text,
    element_matrices,
)
from rough_resonance.fem.oracle import OracleDegeneracyError, disk_ntd_oracle
from rough_resonance.fem.solve import (
    EigenPack,
    EigenSolverError,
    FactorizationError,
    eig_lowest,
    factorize,
    solve_all,
    solve_helmholtz,
)

__all__ = [
    "EigenPack",
    "EigenSolverError",
    "FactorizationError",
    "FemError",
    "FemSystem",
    "OracleDegeneracyError",
    "assemble",
    "assemble_global",
    "disk_ntd_oracle",
    "dump_coordinate_text",
    "eig_lowest",
    "element_matrices",
    "factorize",
    "solve_all",
    "solve_helmholtz",
]
