"""Closed-form output-state quantities: numerator, normalization Z and normality score.

For a sample x the output state is sum_a c_a (x)_l v_a,l with site vectors
v_a,l = (cos phi_a,l, sin phi_a,l) and phi_a,l = theta_a,l + omega_a x_l,
where a = (m, p) runs over the M * P components.
"""

from __future__ import annotations

import math

import numpy as np

from smtad.contracts.types import ScoreBreakdown
from smtad.errors import DegenerateStateError, DomainError
from smtad.model.embedding import check_inputs
from smtad.model.params import ModelParams
from smtad.model.signed_log import signed_exp, signed_log_prod, signed_log_sum

EPS_Z = 1e-12
Z_FLOOR = 1e-30
LOG_FLOOR = -745.0

# elements of the (n, K, K, L) pairwise block held in memory at once
_CHUNK_ELEMENTS = 1 << 21


def clamp_score(value: float) -> float:
    return max(0.0, min(1.0, value))


def chunks(n_rows: int, K: int, L: int) -> list[slice]:
    size = max(1, _CHUNK_ELEMENTS // max(1, K * K * L))
    return [slice(start, min(start + size, n_rows)) for start in range(0, n_rows, size)]


def as_batch(params: ModelParams, x_tilde: np.ndarray) -> np.ndarray:
    X = check_inputs(x_tilde, params.L)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise DomainError("inputs must be a vector or an N x L matrix")
    return X


def phases(params: ModelParams, X: np.ndarray) -> np.ndarray:
    """phi[n, a, l] = theta_a,l + omega_a x_n,l."""
    theta, _, omega = params.flat()
    return theta[None, :, :] + omega[None, :, None] * X[:, None, :]


def component_site_vector(params: ModelParams, m: int, p: int, l: int, x_tilde_l: float) -> np.ndarray:
    """Site-l vector of component (m, p); indices are 0-based array positions."""
    if not (0 <= m < params.M and 0 <= p < params.P and 0 <= l < params.L):
        raise DomainError(f"component index (m={m}, p={p}, l={l}) out of range")
    if not math.isfinite(x_tilde_l):
        raise DomainError("non-finite normalized input")
    angle = params.theta[m, p, l] + params.omega[p] * x_tilde_l
    return np.array([math.cos(angle), math.sin(angle)])


def numerator_signed(params: ModelParams, phi: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Signed-log numerator per sample plus the per-component products it was built from."""
    _, coeff, _ = params.flat()
    comp_sign, comp_log = signed_log_prod(np.cos(phi))
    num_sign, num_log = signed_log_sum(coeff[None, :], comp_sign, comp_log)
    return num_sign, num_log, comp_sign, comp_log


def overlap_matrix(phi: np.ndarray) -> np.ndarray:
    """G[n, a, b] = prod_l cos(phi_a,l - phi_b,l), the pairwise component overlaps."""
    diff = phi[:, :, None, :] - phi[:, None, :, :]
    sign, log = signed_log_prod(np.cos(diff))
    return signed_exp(sign, log)


def quadratic_z(coeff: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Z = c^T G c per sample; negative round-off within EPS_Z * |c|^2 becomes 0.

    Positive values pass through untouched so that scaling c by any lambda
    scales Z by lambda^2; only Z_FLOOR bounds Z from below.
    """
    z = np.einsum("a,nab,b->n", coeff, G, coeff)
    tolerance = EPS_Z * float(coeff @ coeff)
    if (z < -tolerance).any():
        raise DegenerateStateError(f"negative squared norm {z.min():.3e}")
    return np.maximum(z, 0.0)


def log_score_from(num_sign: np.ndarray, num_log: np.ndarray, z: np.ndarray) -> np.ndarray:
    if (z <= Z_FLOOR).any():
        raise DegenerateStateError("normalization constant Z at or below the floor; the output state collapsed")
    with np.errstate(invalid="ignore"):
        log_score = np.minimum(2.0 * num_log - np.log(z), 0.0)
    return np.where(num_sign == 0, LOG_FLOOR, log_score)


def numerator_batch(params: ModelParams, x_tilde: np.ndarray) -> np.ndarray:
    X = as_batch(params, x_tilde)
    num_sign, num_log, _, _ = numerator_signed(params, phases(params, X))
    return signed_exp(num_sign, num_log)


def gram_batch(params: ModelParams, x_tilde: np.ndarray) -> np.ndarray:
    X = as_batch(params, x_tilde)
    _, coeff, _ = params.flat()
    out = np.empty(X.shape[0])
    for part in chunks(X.shape[0], params.K, params.L):
        out[part] = quadratic_z(coeff, overlap_matrix(phases(params, X[part])))
    return out


def numerator(params: ModelParams, x_tilde: np.ndarray) -> float:
    x = check_inputs(x_tilde, params.L)
    if x.ndim != 1:
        raise DomainError("numerator expects a single sample")
    return float(numerator_batch(params, x)[0])


def gram(params: ModelParams, x_tilde: np.ndarray) -> float:
    x = check_inputs(x_tilde, params.L)
    if x.ndim != 1:
        raise DomainError("gram expects a single sample")
    return float(gram_batch(params, x)[0])


def gram_matrix(params: ModelParams, x_tilde: np.ndarray) -> np.ndarray:
    """The (MP) x (MP) overlap matrix G with Z = c^T G c."""
    X = as_batch(params, x_tilde)
    return overlap_matrix(phases(params, X[:1]))[0]


def score_batch(params: ModelParams, x_tilde: np.ndarray) -> dict[str, np.ndarray]:
    """Numerator, Z, score and log-score for every row of an N x L matrix."""
    X = as_batch(params, x_tilde)
    _, coeff, _ = params.flat()
    n = X.shape[0]
    num = np.empty(n)
    z = np.empty(n)
    log_score = np.empty(n)
    for part in chunks(n, params.K, params.L):
        phi = phases(params, X[part])
        num_sign, num_log, _, _ = numerator_signed(params, phi)
        z_part = quadratic_z(coeff, overlap_matrix(phi))
        num[part] = signed_exp(num_sign, num_log)
        z[part] = z_part
        log_score[part] = log_score_from(num_sign, num_log, z_part)
    score = np.clip(np.where(log_score <= LOG_FLOOR, 0.0, np.exp(log_score)), 0.0, 1.0)
    return {"numerator": num, "z": z, "score": score, "log_score": log_score}


def normality_score(params: ModelParams, x_tilde: np.ndarray) -> ScoreBreakdown:
    x = check_inputs(x_tilde, params.L)
    if x.ndim != 1:
        raise DomainError("normality_score expects a single sample")
    out = score_batch(params, x)
    return ScoreBreakdown(
        numerator=float(out["numerator"][0]),
        z=float(out["z"][0]),
        score=clamp_score(float(out["score"][0])),
        log_score=float(out["log_score"][0]),
    )
