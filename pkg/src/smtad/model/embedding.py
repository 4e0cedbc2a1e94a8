from __future__ import annotations

import math

import numpy as np

from smtad.errors import DomainError


def frequency(p: int) -> float:
    return math.pi / 2.0**p


def frequencies(P: int) -> np.ndarray:
    """Embedding frequencies pi / 2**p for p = 1..P."""
    return np.pi / 2.0 ** np.arange(1, P + 1, dtype=float)


def embed_site(x_tilde_l: float, p: int, P: int | None = None) -> np.ndarray:
    if p < 1 or (P is not None and p > P):
        raise DomainError(f"resolution index p={p} out of range")
    if not math.isfinite(x_tilde_l) or not 0.0 <= x_tilde_l <= 1.0:
        raise DomainError(f"normalized input {x_tilde_l!r} outside [0, 1]")
    angle = frequency(p) * x_tilde_l
    return np.array([math.cos(angle), math.sin(angle)])


def embed(x_tilde: np.ndarray, P: int) -> np.ndarray:
    """Input product state of one sample as a (P, L, 2) array of site vectors."""
    x = check_inputs(x_tilde)
    angles = frequencies(P)[:, None] * x[None, :]
    return np.stack([np.cos(angles), np.sin(angles)], axis=-1)


def check_inputs(x_tilde: np.ndarray, L: int | None = None) -> np.ndarray:
    x = np.asarray(x_tilde, dtype=float)
    if L is not None and x.shape[-1] != L:
        raise DomainError(f"expected {L} features, got {x.shape[-1]}")
    if not np.isfinite(x).all():
        raise DomainError("non-finite normalized input")
    return x
