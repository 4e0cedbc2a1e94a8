"""Single- and two-site reduced density matrices of the normalized output state.

With cross-overlaps O_ab,l = cos(phi_a,l - phi_b,l) the site-l matrix is

    rho_l = (1/Z) sum_ab c_a c_b (prod_{l' != l} O_ab,l') v_a,l v_b,l^T

and the two-site version drops both sites from the product and uses
Kronecker pair vectors, the lower site index being the slow one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from smtad.contracts.types import ReducedDensityMatrix
from smtad.errors import DegenerateStateError, DomainError
from smtad.model.embedding import check_inputs
from smtad.model.params import ModelParams
from smtad.model.score import Z_FLOOR, overlap_matrix, phases, quadratic_z
from smtad.model.signed_log import leave_one_out, signed_exp


@dataclass(frozen=True, eq=False)
class SampleState:
    """Per-sample tensors shared by every reduced density matrix of one input."""

    vectors: np.ndarray
    weights: np.ndarray
    cos_diff: np.ndarray
    z: float

    @property
    def L(self) -> int:
        return int(self.vectors.shape[1])


def sample_state(params: ModelParams, x_tilde: np.ndarray) -> SampleState:
    x = check_inputs(x_tilde, params.L)
    if x.ndim != 1:
        raise DomainError("expected a single sample")
    _, coeff, _ = params.flat()
    phi = phases(params, x[None, :])
    z = float(quadratic_z(coeff, overlap_matrix(phi))[0])
    if z <= Z_FLOOR:
        raise DegenerateStateError("normalization constant Z at or below the floor")
    phi = phi[0]
    vectors = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
    cos_diff = np.cos(phi[:, None, :] - phi[None, :, :])
    return SampleState(vectors=vectors, weights=np.outer(coeff, coeff), cos_diff=cos_diff, z=z)


def _symmetrize(rho: np.ndarray) -> np.ndarray:
    return 0.5 * (rho + np.swapaxes(rho, -1, -2))


def single_site_rdms(state: SampleState) -> np.ndarray:
    """All L single-site matrices at once, shape (L, 2, 2)."""
    loo = signed_exp(*leave_one_out(state.cos_diff))
    W = state.weights[:, :, None] * loo
    rho = np.einsum("abl,ali,blj->lij", W, state.vectors, state.vectors) / state.z
    return _symmetrize(rho)


def pair_rdms(state: SampleState, k: int) -> np.ndarray:
    """Two-site matrices rho_{k,l} for every l, shape (L, 4, 4); entry k is not meaningful."""
    factors = state.cos_diff.copy()
    factors[..., k] = 1.0
    W = state.weights[:, :, None] * signed_exp(*leave_one_out(factors))

    V = state.vectors
    anchor = V[:, k, :]
    k_slow = np.einsum("ai,alj->alij", anchor, V)
    l_slow = np.einsum("ali,aj->alij", V, anchor)
    after_k = (np.arange(state.L) > k)[None, :, None, None]
    pair = np.where(after_k, k_slow, l_slow).reshape(V.shape[0], state.L, 4)

    rho = np.einsum("abl,ali,blj->lij", W, pair, pair) / state.z
    return _symmetrize(rho)


def _check_site(params: ModelParams, site: int) -> None:
    if not 0 <= site < params.L:
        raise DomainError(f"site {site} out of range for L={params.L}")


def single_site_rdm(params: ModelParams, x_tilde: np.ndarray, l: int) -> ReducedDensityMatrix:
    """Site-l reduced density matrix (0-based site index)."""
    _check_site(params, l)
    return ReducedDensityMatrix(entries=single_site_rdms(sample_state(params, x_tilde))[l])


def two_site_rdm(params: ModelParams, x_tilde: np.ndarray, k: int, l: int) -> ReducedDensityMatrix:
    _check_site(params, k)
    _check_site(params, l)
    if k == l:
        raise DomainError("two-site reduced density matrix needs two distinct sites")
    return ReducedDensityMatrix(entries=pair_rdms(sample_state(params, x_tilde), k)[l])
