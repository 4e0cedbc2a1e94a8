"""Explicit 2**L state-vector reference for small chains.

Site 0 is the most significant bit of the amplitude index, so a two-site
reduced matrix has the lower site as its slow index.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from smtad.contracts.types import ReducedDensityMatrix
from smtad.errors import DegenerateStateError, DomainError
from smtad.model.embedding import check_inputs
from smtad.model.params import ModelParams

MAX_DENSE_SITES = 16


@dataclass(frozen=True, eq=False)
class DenseState:
    amplitudes: np.ndarray
    L: int

    def __post_init__(self) -> None:
        if self.L > MAX_DENSE_SITES:
            raise DomainError(f"dense state limited to {MAX_DENSE_SITES} sites, got {self.L}")
        if self.amplitudes.shape != (2**self.L,):
            raise DomainError("amplitude vector length must be 2**L")
        if not np.isfinite(self.amplitudes).all():
            raise DomainError("amplitudes must be finite")

    @property
    def norm_squared(self) -> float:
        return float(self.amplitudes @ self.amplitudes)


def build_dense_state(params: ModelParams, x_tilde: np.ndarray) -> DenseState:
    """Unnormalized sum_a c_a (x)_l v_a,l by direct Kronecker expansion."""
    if params.L > MAX_DENSE_SITES:
        raise DomainError(f"dense state limited to {MAX_DENSE_SITES} sites, got L={params.L}")
    x = check_inputs(x_tilde, params.L)
    theta, coeff, omega = params.flat()
    amplitudes = np.zeros(2**params.L)
    for a in range(params.K):
        phi = theta[a] + omega[a] * x
        sites = [np.array([np.cos(angle), np.sin(angle)]) for angle in phi]
        amplitudes += coeff[a] * reduce(np.kron, sites)
    return DenseState(amplitudes=amplitudes, L=params.L)


def dense_score(state: DenseState) -> float:
    norm_squared = state.norm_squared
    if norm_squared <= 0.0:
        raise DegenerateStateError("zero state vector has no normality score")
    return float(state.amplitudes[0] ** 2 / norm_squared)


def dense_partial_trace(state: DenseState, keep: list[int] | tuple[int, ...]) -> ReducedDensityMatrix:
    """Reduced density matrix of the normalized state on one or two 0-based sites."""
    sites = sorted(set(int(site) for site in keep))
    if not 1 <= len(sites) <= 2:
        raise DomainError("partial trace keeps one or two sites")
    if any(not 0 <= site < state.L for site in sites):
        raise DomainError(f"site out of range for L={state.L}")
    norm_squared = state.norm_squared
    if norm_squared <= 0.0:
        raise DegenerateStateError("zero state vector cannot be normalized")

    tensor = (state.amplitudes / np.sqrt(norm_squared)).reshape((2,) * state.L)
    tensor = np.moveaxis(tensor, sites, list(range(len(sites))))
    block = tensor.reshape(2 ** len(sites), -1)
    return ReducedDensityMatrix(entries=block @ block.T)
