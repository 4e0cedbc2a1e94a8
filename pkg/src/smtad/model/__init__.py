from .params import ModelParams, complexity
from .score import (
    LOG_FLOOR,
    Z_FLOOR,
    component_site_vector,
    gram,
    gram_matrix,
    normality_score,
    numerator,
    score_batch,
)

__all__ = [
    "LOG_FLOOR",
    "Z_FLOOR",
    "ModelParams",
    "complexity",
    "component_site_vector",
    "gram",
    "gram_matrix",
    "normality_score",
    "numerator",
    "score_batch",
]
