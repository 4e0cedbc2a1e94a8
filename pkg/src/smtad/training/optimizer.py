from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from smtad.config import TrainConfig
from smtad.errors import NonFiniteGradientError
from smtad.model.params import ModelParams
from smtad.training.loss import Gradient


@dataclass(frozen=True, eq=False)
class OptimizerState:
    """First/second moment buffers shaped like the parameters, plus the step counter."""

    m_theta: np.ndarray
    m_coeff: np.ndarray
    v_theta: np.ndarray
    v_coeff: np.ndarray
    step: int = 0

    @classmethod
    def zeros(cls, params: ModelParams) -> OptimizerState:
        return cls(
            m_theta=np.zeros_like(params.theta),
            m_coeff=np.zeros_like(params.coeff),
            v_theta=np.zeros_like(params.theta),
            v_coeff=np.zeros_like(params.coeff),
        )


def _moments(m: np.ndarray, v: np.ndarray, g: np.ndarray, beta1: float, beta2: float) -> tuple[np.ndarray, np.ndarray]:
    return beta1 * m + (1.0 - beta1) * g, beta2 * v + (1.0 - beta2) * (g * g)


def adam_step(
    params: ModelParams,
    grads: Gradient,
    state: OptimizerState,
    config: TrainConfig,
) -> tuple[ModelParams, OptimizerState]:
    """Bias-corrected adaptive-moment update. No decoupled weight decay: shrinkage lives in the loss."""
    if grads.theta.shape != params.theta.shape or grads.coeff.shape != params.coeff.shape:
        raise ValueError("gradient shape does not match parameters")
    if not grads.is_finite():
        bad = int((~np.isfinite(grads.theta)).sum() + (~np.isfinite(grads.coeff)).sum())
        raise NonFiniteGradientError(
            f"non-finite gradient at step {state.step + 1}",
            diagnostics={"step": state.step + 1, "nonfinite_entries": bad},
        )

    step = state.step + 1
    bc1 = 1.0 - config.beta1**step
    bc2 = 1.0 - config.beta2**step

    m_theta, v_theta = _moments(state.m_theta, state.v_theta, grads.theta, config.beta1, config.beta2)
    m_coeff, v_coeff = _moments(state.m_coeff, state.v_coeff, grads.coeff, config.beta1, config.beta2)

    def _update(value: np.ndarray, m: np.ndarray, v: np.ndarray) -> np.ndarray:
        return value - config.learning_rate * (m / bc1) / (np.sqrt(v / bc2) + config.eps)

    new_params = params.replace(
        theta=_update(params.theta, m_theta, v_theta),
        coeff=_update(params.coeff, m_coeff, v_coeff),
    )
    new_state = OptimizerState(m_theta=m_theta, m_coeff=m_coeff, v_theta=v_theta, v_coeff=v_coeff, step=step)
    return new_params, new_state
