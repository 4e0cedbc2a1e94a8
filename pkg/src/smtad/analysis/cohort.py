from __future__ import annotations

import logging

import numpy as np

from smtad.analysis.entropy import sample_profile
from smtad.contracts.types import Cohort, CohortReport, EntropyProfile, MIMatrix
from smtad.core.seeds import SeedStreams
from smtad.errors import DomainError, EmptySelectionError
from smtad.model.params import ModelParams

logger = logging.getLogger(__name__)

S_FLOOR = 1e-12


def subsample_cohorts(normal_rows: np.ndarray, anomalous_rows: np.ndarray, size: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Draw at most ``size`` rows per cohort without replacement, normal cohort first."""
    rng = SeedStreams(seed).generator("subsample")
    picked = []
    for rows in (normal_rows, anomalous_rows):
        if rows.shape[0] <= size:
            picked.append(rows)
        else:
            picked.append(rows[np.sort(rng.choice(rows.shape[0], size=size, replace=False))])
    return picked[0], picked[1]


def _average(params: ModelParams, rows: np.ndarray, cohort: Cohort) -> tuple[EntropyProfile, MIMatrix]:
    if rows.ndim != 2 or rows.shape[0] == 0:
        raise DomainError(f"{cohort.value} cohort is empty")
    entropy_sum = np.zeros(params.L)
    mi_sum = np.zeros((params.L, params.L))
    for x in rows:
        single, mi = sample_profile(params, x)
        entropy_sum += single
        mi_sum += mi
    n = rows.shape[0]
    return (
        EntropyProfile(entropies=entropy_sum / n, n_samples=n, cohort=cohort),
        MIMatrix(values=mi_sum / n, n_samples=n, cohort=cohort),
    )


def amplification_ratio(anomalous: np.ndarray, normal: np.ndarray, s_floor: float = S_FLOOR) -> np.ndarray:
    """S_anom / max(S_norm, s_floor); a zero anomalous entropy gives 0 whatever the denominator."""
    ratio = anomalous / np.maximum(normal, s_floor)
    return np.where(anomalous == 0.0, 0.0, ratio)


def cohort_profiles(
    params: ModelParams,
    normal_rows: np.ndarray,
    anomalous_rows: np.ndarray,
    s_floor: float = S_FLOOR,
) -> CohortReport:
    normal, normal_mi = _average(params, np.asarray(normal_rows, dtype=float), Cohort.NORMAL)
    anomalous, anomalous_mi = _average(params, np.asarray(anomalous_rows, dtype=float), Cohort.ANOMALOUS)
    amplification = amplification_ratio(anomalous.entropies, normal.entropies, s_floor)
    logger.info(
        "cohort profiles over %d normal / %d anomalous samples; max amplification %.3f",
        normal.n_samples, anomalous.n_samples, float(amplification.max(initial=0.0)),
    )
    return CohortReport(
        normal=normal,
        anomalous=anomalous,
        normal_mi=normal_mi,
        anomalous_mi=anomalous_mi,
        amplification=amplification,
    )


def select_features(amplification: np.ndarray, threshold: float) -> list[int]:
    """1-based sites whose amplification reaches ``threshold``, ascending."""
    if threshold <= 0:
        raise DomainError("selection threshold must be > 0")
    sites = [int(idx) + 1 for idx in np.flatnonzero(np.asarray(amplification) >= threshold)]
    if not sites:
        raise EmptySelectionError(f"no site reaches amplification {threshold}; lower the threshold")
    return sites
