from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from smtad.errors import DomainError
from smtad.model.embedding import frequencies

INIT_THETA_SPREAD = 0.1


@dataclass(frozen=True, eq=False)
class ModelParams:
    """Learnable set {c_mp, theta^mp_l} of the superposed rotation MPO.

    theta is indexed (m, p, l) in radians and coeff (m, p). Frequencies
    are derived from p and never stored.
    """

    theta: np.ndarray
    coeff: np.ndarray

    def __post_init__(self) -> None:
        theta = np.array(self.theta, dtype=float)
        coeff = np.array(self.coeff, dtype=float)
        if theta.ndim != 3:
            raise DomainError("theta must be indexed (m, p, l)")
        if coeff.shape != theta.shape[:2]:
            raise DomainError(f"coeff shape {coeff.shape} does not match theta {theta.shape[:2]}")
        if not (np.isfinite(theta).all() and np.isfinite(coeff).all()):
            raise DomainError("parameters must be finite")
        if not np.any(coeff):
            raise DomainError("coeff is identically zero")
        theta.setflags(write=False)
        coeff.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "coeff", coeff)

    @property
    def M(self) -> int:
        return int(self.theta.shape[0])

    @property
    def P(self) -> int:
        return int(self.theta.shape[1])

    @property
    def L(self) -> int:
        return int(self.theta.shape[2])

    @property
    def K(self) -> int:
        """Number of superposed components, M * P."""
        return self.M * self.P

    @property
    def n_learnables(self) -> int:
        return self.M * self.P * (self.L + 1)

    @property
    def omega(self) -> np.ndarray:
        return frequencies(self.P)

    def flat(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(theta (K, L), coeff (K,), omega (K,)) with component index a = m * P + p."""
        theta = self.theta.reshape(self.K, self.L)
        coeff = self.coeff.reshape(self.K)
        omega = np.tile(self.omega, self.M)
        return theta, coeff, omega

    def replace(self, theta: np.ndarray | None = None, coeff: np.ndarray | None = None) -> ModelParams:
        return ModelParams(
            theta=np.array(self.theta if theta is None else theta, dtype=float),
            coeff=np.array(self.coeff if coeff is None else coeff, dtype=float),
        )

    @classmethod
    def initialize(cls, L: int, M: int, P: int, rng: np.random.Generator) -> ModelParams:
        """theta ~ U(-0.1, 0.1), c = 1/sqrt(MP): a near-even superposition of near-identity rotations."""
        if min(L, M, P) < 1:
            raise DomainError("L, M and P must all be >= 1")
        theta = rng.uniform(-INIT_THETA_SPREAD, INIT_THETA_SPREAD, size=(M, P, L))
        coeff = np.full((M, P), 1.0 / np.sqrt(M * P))
        return cls(theta=theta, coeff=coeff)


def complexity(L: int, M: int, P: int) -> dict[str, int]:
    """Parameter count and per-sample operation counts of scoring and training."""
    K = M * P
    return {
        "n_learnables": K * (L + 1),
        "numerator_ops": L * K,
        "gram_ops": L * K * K,
        "gradient_ops": L * K * (K + 1),
    }
