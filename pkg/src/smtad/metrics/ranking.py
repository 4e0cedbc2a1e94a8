"""Threshold-free ranking metrics over anomaly scores (higher = more anomalous)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from smtad.contracts.types import MetricsReport, ScoreBreakdown, ScoredTestSet
from smtad.errors import DomainError, UndefinedMetricError


def to_anomaly_score(breakdown: ScoreBreakdown) -> float:
    return -breakdown.log_score


def _classes(data: ScoredTestSet) -> tuple[np.ndarray, np.ndarray, int, int]:
    scores = np.asarray(data.anomaly_scores, dtype=float)
    labels = np.asarray(data.labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise DomainError("scores and labels must be 1-D and of equal length")
    if not np.isfinite(scores).all():
        raise DomainError("anomaly scores must be finite")
    positive = labels == 1
    n_pos = int(positive.sum())
    n_neg = int(labels.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError(f"need both classes, got {n_pos} positive and {n_neg} negative")
    return scores, positive, n_pos, n_neg


def auroc(data: ScoredTestSet) -> float:
    """Mann-Whitney statistic; tied positive/negative pairs count one half."""
    scores, positive, n_pos, n_neg = _classes(data)
    ranks = rankdata(scores, method="average")
    u = ranks[positive].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def auprc(data: ScoredTestSet) -> float:
    """Step-wise average precision; equal scores form a single cut."""
    scores, positive, n_pos, _ = _classes(data)
    order = np.argsort(-scores, kind="mergesort")
    sorted_scores = scores[order]
    hits = positive[order].astype(float)

    # last index of every run of equal scores
    cut_ends = np.flatnonzero(np.r_[sorted_scores[1:] != sorted_scores[:-1], True])
    tp = np.cumsum(hits)[cut_ends]
    precision = tp / (cut_ends + 1)
    recall_step = np.diff(np.r_[0.0, tp]) / n_pos
    return float(np.sum(precision * recall_step))


def evaluate(anomaly_scores: np.ndarray, labels: np.ndarray, seed: int | None = None) -> MetricsReport:
    data = ScoredTestSet(anomaly_scores=np.asarray(anomaly_scores, dtype=float), labels=np.asarray(labels))
    _, _, n_pos, n_neg = _classes(data)
    return MetricsReport(auroc=auroc(data), auprc=auprc(data), n_pos=n_pos, n_neg=n_neg, seed=seed)


@dataclass(frozen=True)
class MetricsSummary:
    auroc_mean: float
    auroc_std: float
    auprc_mean: float
    auprc_std: float
    runs: int
    seeds: list[int | None]


def aggregate(reports: list[MetricsReport]) -> MetricsSummary:
    """Mean and sample standard deviation (zero for a single run)."""
    if not reports:
        raise DomainError("nothing to aggregate")
    ddof = 1 if len(reports) > 1 else 0
    aurocs = np.array([report.auroc for report in reports])
    auprcs = np.array([report.auprc for report in reports])
    return MetricsSummary(
        auroc_mean=float(aurocs.mean()),
        auroc_std=float(aurocs.std(ddof=ddof)),
        auprc_mean=float(auprcs.mean()),
        auprc_std=float(auprcs.std(ddof=ddof)),
        runs=len(reports),
        seeds=[report.seed for report in reports],
    )
