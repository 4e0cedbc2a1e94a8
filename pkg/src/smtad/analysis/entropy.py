from __future__ import annotations

import numpy as np
from scipy.special import xlogy

from smtad.analysis.density import pair_rdms, sample_state, single_site_rdms
from smtad.contracts.types import ReducedDensityMatrix
from smtad.errors import DomainError
from smtad.model.params import ModelParams


def entropies(rho: np.ndarray) -> np.ndarray:
    """Von Neumann entropy in nats over the trailing two axes of a stack of matrices."""
    eigenvalues = np.clip(np.linalg.eigvalsh(rho), 0.0, 1.0)
    return -np.sum(xlogy(eigenvalues, eigenvalues), axis=-1)


def von_neumann_entropy(rho: ReducedDensityMatrix | np.ndarray) -> float:
    entries = rho.entries if isinstance(rho, ReducedDensityMatrix) else np.asarray(rho, dtype=float)
    return float(entropies(entries))


def sample_profile(params: ModelParams, x_tilde: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Single-site entropies (L,) and the pairwise mutual-information matrix (L, L) of one input."""
    state = sample_state(params, x_tilde)
    single = entropies(single_site_rdms(state))
    L = state.L
    mi = np.zeros((L, L))
    for k in range(L - 1):
        pair = entropies(pair_rdms(state, k)[k + 1 :])
        values = np.maximum(single[k] + single[k + 1 :] - pair, 0.0)
        mi[k, k + 1 :] = values
        mi[k + 1 :, k] = values
    return single, mi


def mutual_information(params: ModelParams, x_tilde: np.ndarray, k: int, l: int) -> float:
    """I_{k,l} = S_k + S_l - S_{k,l}, clamped below at zero."""
    if k == l:
        raise DomainError("mutual information needs two distinct sites")
    for site in (k, l):
        if not 0 <= site < params.L:
            raise DomainError(f"site {site} out of range for L={params.L}")
    state = sample_state(params, x_tilde)
    single = entropies(single_site_rdms(state))
    lo, hi = min(k, l), max(k, l)
    joint = float(entropies(pair_rdms(state, lo)[hi]))
    return max(float(single[k] + single[l]) - joint, 0.0)
