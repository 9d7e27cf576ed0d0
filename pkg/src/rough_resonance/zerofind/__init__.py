"""Resonance location: contour grids, local minimization and certified boxes."""

from rough_resonance.zerofind.certify import (
    AffineEvaluator,
    AnalyticEvaluator,
    BoxDecision,
    CertificationInconclusiveError,
    CertifiedRegion,
    HankelEvaluator,
    ModelEvaluator,
    certification_domain,
    certify_box,
    tile,
    zero_boxes,
)
from rough_resonance.zerofind.contour import (
    ContourGrid,
    contour_grid,
    det_evaluator,
    local_minima,
)
from rough_resonance.zerofind.minimize import (
    RefinementError,
    RefinementLevel,
    ResonanceResult,
    affine_logdet,
    anchored_refinement,
    convergence_slope,
    estimate_multiplicity,
    minimize,
    winding_number,
)
from rough_resonance.zerofind.rect import LOWER_HALF_PLANE_MESSAGE, Rect, ZeroFindError

__all__ = [
    "LOWER_HALF_PLANE_MESSAGE",
    "AffineEvaluator",
    "AnalyticEvaluator",
    "BoxDecision",
    "CertificationInconclusiveError",
    "CertifiedRegion",
    "ContourGrid",
    "HankelEvaluator",
    "ModelEvaluator",
    "Rect",
    "RefinementError",
    "RefinementLevel",
    "ResonanceResult",
    "ZeroFindError",
    "affine_logdet",
    "anchored_refinement",
    "certification_domain",
    "certify_box",
    "contour_grid",
    "convergence_slope",
    "det_evaluator",
    "estimate_multiplicity",
    "local_minima",
    "minimize",
    "tile",
    "winding_number",
    "zero_boxes",
]
