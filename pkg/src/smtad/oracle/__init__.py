from .dense import MAX_DENSE_SITES, DenseState, build_dense_state, dense_partial_trace, dense_score

__all__ = ["MAX_DENSE_SITES", "DenseState", "build_dense_state", "dense_partial_trace", "dense_score"]
