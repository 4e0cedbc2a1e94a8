"""Regularized negative log-likelihood and its analytic gradient.

Per sample the unregularized loss is -ln a = -2 ln|N| + ln Z. Differentiating
an L-fold cosine product with respect to theta_a,l swaps the site-l factor
cos(.) for -sin(.); leave-one-out products come from prefix/suffix passes,
so the full gradient costs O(L * K * (K + 1)) per sample with K = M * P.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from smtad.contracts.types import LossReport
from smtad.errors import DomainError
from smtad.model.params import ModelParams
from smtad.model.score import (
    as_batch,
    chunks,
    log_score_from,
    numerator_signed,
    phases,
    quadratic_z,
    score_batch,
)
from smtad.model.signed_log import leave_one_out, signed_exp, signed_log_prod


@dataclass(frozen=True, eq=False)
class Gradient:
    theta: np.ndarray
    coeff: np.ndarray

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.theta).all() and np.isfinite(self.coeff).all())


def regularizer(params: ModelParams, lambda_c: float, lambda_theta: float) -> float:
    return float(lambda_c * np.sum(params.coeff**2) + lambda_theta * np.sum(params.theta**2))


def regularizer_gradient(params: ModelParams, lambda_c: float, lambda_theta: float) -> Gradient:
    return Gradient(theta=2.0 * lambda_theta * params.theta, coeff=2.0 * lambda_c * params.coeff)


def _batch(params: ModelParams, batch: np.ndarray) -> np.ndarray:
    X = as_batch(params, batch)
    if X.shape[0] == 0:
        raise DomainError("batch is empty")
    return X


def loss(params: ModelParams, batch: np.ndarray, lambda_c: float, lambda_theta: float) -> LossReport:
    X = _batch(params, batch)
    log_scores = score_batch(params, X)["log_score"]
    nll = float(-np.mean(log_scores))
    reg = regularizer(params, lambda_c, lambda_theta)
    return LossReport(nll=nll, reg=reg, total=nll + reg, mean_log_score=float(np.mean(log_scores)))


def sample_terms(params: ModelParams, X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-sample log-scores and gradients of -ln a: shapes (n,), (n, K, L), (n, K)."""
    _, coeff, _ = params.flat()
    phi = phases(params, X)
    cos_phi = np.cos(phi)
    sin_phi = np.sin(phi)

    num_sign, num_log, comp_sign, comp_log = numerator_signed(params, phi)

    diff = phi[:, :, None, :] - phi[:, None, :, :]
    cos_diff = np.cos(diff)
    g_sign, g_log = signed_log_prod(cos_diff)
    G = signed_exp(g_sign, g_log)
    z = quadratic_z(coeff, G)
    log_scores = log_score_from(num_sign, num_log, z)

    # an exactly vanishing numerator pins the score at the log floor; that term has no gradient
    live = (num_sign != 0)[:, None]
    ratio_comp = signed_exp(comp_sign * num_sign[:, None], comp_log - num_log[:, None])
    grad_coeff = np.where(live, -2.0 * ratio_comp, 0.0) + 2.0 * np.einsum("nab,b->na", G, coeff) / z[:, None]

    loo_sign, loo_log = leave_one_out(cos_phi)
    ratio_loo = signed_exp(loo_sign * num_sign[:, None, None], loo_log - num_log[:, None, None])
    numerator_term = np.where(live[:, :, None], 2.0 * coeff[None, :, None] * sin_phi * ratio_loo, 0.0)

    gl_sign, gl_log = leave_one_out(cos_diff)
    overlap_grad = np.einsum("b,nabl->nal", coeff, np.sin(diff) * signed_exp(gl_sign, gl_log))
    norm_term = -2.0 * coeff[None, :, None] * overlap_grad / z[:, None, None]

    return log_scores, numerator_term + norm_term, grad_coeff


def loss_and_gradient(
    params: ModelParams,
    batch: np.ndarray,
    lambda_c: float,
    lambda_theta: float,
) -> tuple[LossReport, Gradient]:
    X = _batch(params, batch)
    n = X.shape[0]
    log_sum = 0.0
    theta_sum = np.zeros((params.K, params.L))
    coeff_sum = np.zeros(params.K)
    for part in chunks(n, params.K, params.L):
        log_scores, grad_theta, grad_coeff = sample_terms(params, X[part])
        log_sum += float(np.sum(log_scores))
        theta_sum += grad_theta.sum(axis=0)
        coeff_sum += grad_coeff.sum(axis=0)

    reg = regularizer(params, lambda_c, lambda_theta)
    reg_grad = regularizer_gradient(params, lambda_c, lambda_theta)
    nll = -log_sum / n
    report = LossReport(nll=nll, reg=reg, total=nll + reg, mean_log_score=log_sum / n)
    grad = Gradient(
        theta=(theta_sum / n).reshape(params.theta.shape) + reg_grad.theta,
        coeff=(coeff_sum / n).reshape(params.coeff.shape) + reg_grad.coeff,
    )
    return report, grad


def gradient(params: ModelParams, batch: np.ndarray, lambda_c: float, lambda_theta: float) -> Gradient:
    return loss_and_gradient(params, batch, lambda_c, lambda_theta)[1]
