from __future__ import annotations

import math

import numpy as np

from smtad.contracts.types import NormalizedDataset, SplitTag
from smtad.core.seeds import SeedStreams
from smtad.errors import DomainError, EmptyTrainingError


def split_tags(labels: np.ndarray, train_fraction: float, seed: int) -> tuple[SplitTag, ...]:
    """Tag floor(fraction * |normal|) normal rows as train, uniformly at random under ``seed``."""
    if not 0.0 < train_fraction < 1.0:
        raise DomainError("train_fraction must lie strictly between 0 and 1")
    labels = np.asarray(labels)
    normal_idx = np.flatnonzero(labels == 0)
    n_train = math.floor(train_fraction * normal_idx.size)
    if n_train == 0:
        raise EmptyTrainingError(f"no training rows: {normal_idx.size} normal rows at fraction {train_fraction}")

    rng = SeedStreams(seed).generator("split")
    chosen = set(rng.permutation(normal_idx)[:n_train].tolist())
    tags = []
    for idx, label in enumerate(labels):
        if label != 0:
            tags.append(SplitTag.TEST_ANOMALOUS)
        elif idx in chosen:
            tags.append(SplitTag.TRAIN)
        else:
            tags.append(SplitTag.TEST_NORMAL)
    return tuple(tags)


def split(data: NormalizedDataset, train_fraction: float, seed: int) -> NormalizedDataset:
    if any(tag != SplitTag.UNSPLIT for tag in data.tags):
        raise DomainError("dataset is already split")
    tags = split_tags(data.labels, train_fraction, seed)
    return NormalizedDataset(values=data.values, labels=data.labels, tags=tags)
