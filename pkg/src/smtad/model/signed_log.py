"""Underflow-safe products and sums kept as (sign, log|value|) pairs.

Exact zeros are carried as sign 0 with log magnitude -inf, so a zero
factor gives a well-defined zero product instead of a NaN.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SignedLogProduct:
    sign: int
    log_magnitude: float

    @classmethod
    def of(cls, factors: np.ndarray) -> SignedLogProduct:
        sign, log = signed_log_prod(np.asarray(factors, dtype=float))
        return cls(sign=int(sign), log_magnitude=float(log))

    @property
    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * float(np.exp(self.log_magnitude))


def signed_log(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    with np.errstate(divide="ignore"):
        return np.sign(values), np.log(np.abs(values))


def signed_log_prod(factors: np.ndarray, axis: int = -1) -> tuple[np.ndarray, np.ndarray]:
    signs, logs = signed_log(factors)
    sign = np.prod(signs, axis=axis)
    log = np.sum(logs, axis=axis)
    return sign, np.where(sign == 0, -np.inf, log)


def signed_log_sum(
    weights: np.ndarray,
    signs: np.ndarray,
    logs: np.ndarray,
    axis: int = -1,
) -> tuple[np.ndarray, np.ndarray]:
    """Sum_i w_i * s_i * exp(log_i) along ``axis`` as (sign, log|sum|)."""
    live = signs != 0
    shift = np.max(np.where(live, logs, -np.inf), axis=axis, keepdims=True)
    safe_shift = np.where(np.isfinite(shift), shift, 0.0)
    with np.errstate(invalid="ignore", over="ignore"):
        scaled = np.where(live, signs * np.exp(logs - safe_shift), 0.0)
    total = np.sum(weights * scaled, axis=axis)
    sign, log = signed_log(total)
    log = log + np.squeeze(safe_shift, axis=axis)
    return sign, np.where(sign == 0, -np.inf, log)


def signed_exp(signs: np.ndarray, logs: np.ndarray) -> np.ndarray:
    with np.errstate(invalid="ignore", over="ignore"):
        return np.where(signs == 0, 0.0, signs * np.exp(logs))


def leave_one_out(factors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Products over the last axis excluding each position in turn.

    Built from exclusive prefix and suffix accumulations, so every
    leave-one-out product costs O(1) after an O(L) pass.
    """
    signs, logs = signed_log(factors)
    ones = np.ones_like(signs[..., :1])
    zeros = np.zeros_like(logs[..., :1])

    prefix_sign = np.concatenate([ones, np.cumprod(signs, axis=-1)[..., :-1]], axis=-1)
    prefix_log = np.concatenate([zeros, np.cumsum(logs, axis=-1)[..., :-1]], axis=-1)

    rev_signs = signs[..., ::-1]
    rev_logs = logs[..., ::-1]
    suffix_sign = np.concatenate([ones, np.cumprod(rev_signs, axis=-1)[..., :-1]], axis=-1)[..., ::-1]
    suffix_log = np.concatenate([zeros, np.cumsum(rev_logs, axis=-1)[..., :-1]], axis=-1)[..., ::-1]

    sign = prefix_sign * suffix_sign
    log = prefix_log + suffix_log
    return sign, np.where(sign == 0, -np.inf, log)
