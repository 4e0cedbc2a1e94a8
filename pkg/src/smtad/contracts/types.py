from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class SplitTag(str, Enum):
    UNSPLIT = "unsplit"
    TRAIN = "train"
    TEST_NORMAL = "test-normal"
    TEST_ANOMALOUS = "test-anomalous"


class FeatureMode(str, Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"


class Cohort(str, Enum):
    NORMAL = "normal"
    ANOMALOUS = "anomalous"


class EventType(str, Enum):
    EPOCH = "EPOCH"
    GUARD = "GUARD"
    CELL = "CELL"
    METRICS = "METRICS"


@dataclass(frozen=True, eq=False)
class RawDataset:
    values: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.values.ndim != 2:
            raise ValueError("values must be an N x L matrix")
        if self.labels.shape != (self.values.shape[0],):
            raise ValueError("labels must have one entry per row")
        if self.labels.size and not np.isin(self.labels, (0, 1)).all():
            raise ValueError("labels must be 0 (normal) or 1 (anomalous)")
        if self.feature_names and len(self.feature_names) != self.values.shape[1]:
            raise ValueError("feature_names must have one entry per column")

    @property
    def n_rows(self) -> int:
        return int(self.values.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.values.shape[1])


@dataclass(frozen=True, eq=False)
class NormalizedDataset:
    values: np.ndarray
    labels: np.ndarray
    tags: tuple[SplitTag, ...]

    def __post_init__(self) -> None:
        if len(self.tags) != self.values.shape[0] or self.labels.shape != (self.values.shape[0],):
            raise ValueError("labels and tags must have one entry per row")
        if self.values.size and (self.values.min() < 0.0 or self.values.max() > 1.0):
            raise ValueError("normalized values must lie in [0, 1]")
        for tag, label in zip(self.tags, self.labels):
            if tag == SplitTag.TRAIN and label != 0:
                raise ValueError("anomalous rows cannot be tagged train")

    @classmethod
    def unsplit(cls, values: np.ndarray, labels: np.ndarray) -> NormalizedDataset:
        return cls(values=values, labels=labels, tags=(SplitTag.UNSPLIT,) * values.shape[0])

    @property
    def is_split(self) -> bool:
        return SplitTag.UNSPLIT not in self.tags

    def mask(self, *tags: SplitTag) -> np.ndarray:
        return np.array([tag in tags for tag in self.tags], dtype=bool)

    @property
    def train_values(self) -> np.ndarray:
        return self.values[self.mask(SplitTag.TRAIN)]

    @property
    def test_mask(self) -> np.ndarray:
        return self.mask(SplitTag.TEST_NORMAL, SplitTag.TEST_ANOMALOUS)

    def restrict(self, sites: list[int]) -> NormalizedDataset:
        """Keep only the given 1-based feature sites."""
        columns = [site - 1 for site in sites]
        return NormalizedDataset(values=self.values[:, columns], labels=self.labels, tags=self.tags)


@dataclass(frozen=True)
class ScoreBreakdown:
    numerator: float
    z: float
    score: float
    log_score: float


@dataclass(frozen=True)
class LossReport:
    nll: float
    reg: float
    total: float
    mean_log_score: float


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    nll: float
    reg: float
    total: float


@dataclass(frozen=True)
class GuardEvent:
    epoch: int
    state: str
    prev_state: str
    reason_codes: list[str]
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class ScoredTestSet:
    anomaly_scores: np.ndarray
    labels: np.ndarray


@dataclass(frozen=True)
class MetricsReport:
    auroc: float
    auprc: float
    n_pos: int
    n_neg: int
    seed: int | None = None


@dataclass(frozen=True)
class SweepCellResult:
    M: int
    P: int
    seed: int
    auroc: float
    auprc: float
    n_pos: int
    n_neg: int
    n_learnables: int

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.M, self.P, self.seed)


@dataclass(frozen=True, eq=False)
class ReducedDensityMatrix:
    entries: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])


@dataclass(frozen=True, eq=False)
class EntropyProfile:
    entropies: np.ndarray
    n_samples: int
    cohort: Cohort


@dataclass(frozen=True, eq=False)
class MIMatrix:
    values: np.ndarray
    n_samples: int
    cohort: Cohort


@dataclass(frozen=True, eq=False)
class CohortReport:
    normal: EntropyProfile
    anomalous: EntropyProfile
    normal_mi: MIMatrix
    anomalous_mi: MIMatrix
    amplification: np.ndarray
