"""Spectral model, truncated operator T_n(k) and its determinant."""

from rough_resonance.ntd.heuristics import (
    OPTIMAL_N_TABLE,
    PRACTICAL_C,
    LinearFit,
    Schedule,
    diagonal_profile,
    first_minimum,
    fit_constant,
    linear_fit,
    optimal_N,
    optimal_N_from_model,
    param_schedule,
    practical_N,
    table_fit,
    tail_bound,
)
from rough_resonance.ntd.logdet import LogDet, logdet, wrap_angle
from rough_resonance.ntd.model import (
    ModelError,
    SpectralModel,
    TOverflowError,
    build_model,
    corrector_weights,
    eval_a,
    eval_t,
    load_model,
    model_from_dict,
    model_to_dict,
    reference_matrix,
    save_model,
)

__all__ = [
    "OPTIMAL_N_TABLE",
    "PRACTICAL_C",
    "LinearFit",
    "LogDet",
    "ModelError",
    "Schedule",
    "SpectralModel",
    "TOverflowError",
    "build_model",
    "corrector_weights",
    "diagonal_profile",
    "first_minimum",
    "eval_a",
    "eval_t",
    "fit_constant",
    "linear_fit",
    "load_model",
    "logdet",
    "model_from_dict",
    "model_to_dict",
    "optimal_N",
    "optimal_N_from_model",
    "param_schedule",
    "practical_N",
    "reference_matrix",
    "save_model",
    "table_fit",
    "tail_bound",
    "wrap_angle",
]
