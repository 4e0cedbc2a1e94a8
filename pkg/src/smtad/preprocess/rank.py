from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from smtad.contracts.types import FeatureMode, RawDataset
from smtad.errors import DatasetError, DomainError

DEFAULT_DISCRETE_THRESHOLD = 12


@dataclass(frozen=True, eq=False)
class FeatureTable:
    """Empirical CDF of one feature: sorted distinct levels and their mapped values."""

    mode: FeatureMode
    levels: np.ndarray
    mapped: np.ndarray
    n_ref: int

    @property
    def n_levels(self) -> int:
        return int(self.levels.size)

    def apply(self, column: np.ndarray) -> np.ndarray:
        if self.mode == FeatureMode.CONTINUOUS:
            return np.interp(column, self.levels, self.mapped, left=1.0 / (2 * self.n_ref), right=1.0)
        # unseen discrete levels take the nearest seen level, ties to the lower one
        upper = np.clip(np.searchsorted(self.levels, column, side="left"), 0, self.n_levels - 1)
        lower = np.clip(upper - 1, 0, self.n_levels - 1)
        pick_upper = np.abs(self.levels[upper] - column) < np.abs(column - self.levels[lower])
        return self.mapped[np.where(pick_upper, upper, lower)]

    def to_state(self) -> dict:
        return {
            "mode": self.mode.value,
            "levels": self.levels.tolist(),
            "mapped": self.mapped.tolist(),
            "n_ref": self.n_ref,
        }

    @classmethod
    def from_state(cls, state: dict) -> FeatureTable:
        return cls(
            mode=FeatureMode(state["mode"]),
            levels=np.asarray(state["levels"], dtype=float),
            mapped=np.asarray(state["mapped"], dtype=float),
            n_ref=int(state["n_ref"]),
        )


@dataclass(frozen=True, eq=False)
class RankNormalizer:
    tables: tuple[FeatureTable, ...]

    @property
    def n_features(self) -> int:
        return len(self.tables)

    @property
    def modes(self) -> list[FeatureMode]:
        return [table.mode for table in self.tables]

    def restrict(self, sites: list[int]) -> RankNormalizer:
        return RankNormalizer(tables=tuple(self.tables[site - 1] for site in sites))

    def to_state(self) -> list[dict]:
        return [table.to_state() for table in self.tables]

    @classmethod
    def from_state(cls, state: list[dict]) -> RankNormalizer:
        return cls(tables=tuple(FeatureTable.from_state(item) for item in state))


def _fit_feature(column: np.ndarray, discrete_threshold: int) -> FeatureTable:
    n_ref = column.size
    levels, first = np.unique(column, return_index=True)
    if levels.size == 1 or levels.size <= discrete_threshold:
        mapped = np.arange(1, levels.size + 1, dtype=float) / levels.size
        return FeatureTable(mode=FeatureMode.DISCRETE, levels=levels, mapped=mapped, n_ref=n_ref)
    # average ranks: tied values share the mean of their rank positions
    ranks = rankdata(column, method="average")
    mapped = ranks[first] / n_ref
    return FeatureTable(mode=FeatureMode.CONTINUOUS, levels=levels, mapped=mapped, n_ref=n_ref)


def fit_rank_normalizer(
    reference: RawDataset | np.ndarray,
    discrete_threshold: int = DEFAULT_DISCRETE_THRESHOLD,
) -> RankNormalizer:
    values = reference.values if isinstance(reference, RawDataset) else np.asarray(reference, dtype=float)
    if values.ndim != 2 or values.shape[0] == 0:
        raise DatasetError("reference data must be a non-empty N x L matrix")
    if not np.isfinite(values).all():
        raise DomainError("reference data contains non-finite values")
    tables = tuple(_fit_feature(values[:, l], discrete_threshold) for l in range(values.shape[1]))
    return RankNormalizer(tables=tables)


def transform(normalizer: RankNormalizer, values: np.ndarray) -> np.ndarray:
    data = np.asarray(values, dtype=float)
    if data.ndim != 2 or data.shape[1] != normalizer.n_features:
        raise DomainError(f"expected {normalizer.n_features} feature columns, got shape {data.shape}")
    if not np.isfinite(data).all():
        raise DomainError("non-finite value in input data")
    out = np.empty_like(data)
    for l, table in enumerate(normalizer.tables):
        out[:, l] = table.apply(data[:, l])
    return np.clip(out, 0.0, 1.0)
