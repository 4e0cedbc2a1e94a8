"""Plot-ready CSV and JSON exports. Every CSV carries a header row."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, is_dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from smtad.contracts.types import CohortReport, EpochRecord, LossReport
from smtad.errors import DatasetError, DomainError

SCORE_COLUMNS = ("id", "normality_score", "log_score", "anomaly_score")


def _write_rows(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def write_loss_history(path: str | Path, initial: LossReport, history: list[EpochRecord]) -> None:
    rows = [(0, initial.nll, initial.reg, initial.total)]
    rows.extend((record.epoch, record.nll, record.reg, record.total) for record in history)
    _write_rows(path, ("epoch", "nll", "reg", "total"), rows)


def write_scores(
    path: str | Path,
    row_ids: Sequence[str],
    scores: dict[str, np.ndarray],
    labels: np.ndarray | None = None,
) -> None:
    header = list(SCORE_COLUMNS) + (["label"] if labels is not None else [])
    rows = []
    for idx, row_id in enumerate(row_ids):
        log_score = float(scores["log_score"][idx])
        row = [row_id, float(scores["score"][idx]), log_score, -log_score]
        if labels is not None:
            row.append(int(labels[idx]))
        rows.append(row)
    _write_rows(path, header, rows)


def read_scores(path: str | Path) -> tuple[np.ndarray, np.ndarray | None]:
    """Anomaly scores and, when the file has a label column, the labels."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as handle:
            reader = csv.DictReader(handle)
            records = list(reader)
            fieldnames = reader.fieldnames or []
    except FileNotFoundError as exc:
        raise DatasetError(f"scores file not found: {path}") from exc
    if "anomaly_score" not in fieldnames:
        raise DatasetError(f"{path} has no anomaly_score column")
    scores = np.array([float(record["anomaly_score"]) for record in records], dtype=float)
    if "label" not in fieldnames:
        return scores, None
    labels = np.array([int(record["label"]) for record in records], dtype=int)
    return scores, labels


def histogram(scores: np.ndarray, labels: np.ndarray | None, bins: int) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    """Normality-score counts over equal-width bins of [0, 1], per cohort."""
    if bins < 1:
        raise DomainError("histogram needs at least one bin")
    edges = np.linspace(0.0, 1.0, bins + 1)
    scores = np.asarray(scores, dtype=float)
    if labels is None:
        cohorts = {"all": scores}
    else:
        cohorts = {"normal": scores[labels == 0], "anomalous": scores[labels == 1]}
    return edges, {name: np.histogram(values, bins=edges)[0] for name, values in cohorts.items()}


def write_histogram(path: str | Path, scores: np.ndarray, labels: np.ndarray | None, bins: int) -> None:
    edges, counts = histogram(scores, labels, bins)
    names = list(counts)
    rows = [
        [float(edges[idx]), float(edges[idx + 1])] + [int(counts[name][idx]) for name in names]
        for idx in range(bins)
    ]
    _write_rows(path, ["bin_lo", "bin_hi"] + names, rows)


def write_profiles(path: str | Path, report: CohortReport) -> None:
    rows = [
        (site + 1, float(report.normal.entropies[site]), float(report.anomalous.entropies[site]), float(report.amplification[site]))
        for site in range(report.normal.entropies.size)
    ]
    _write_rows(path, ("site", "entropy_normal", "entropy_anomalous", "amplification"), rows)


def write_mi(path: str | Path, matrix: np.ndarray) -> None:
    L = matrix.shape[0]
    rows = [[site + 1] + [float(value) for value in matrix[site]] for site in range(L)]
    _write_rows(path, ["site"] + [str(site + 1) for site in range(L)], rows)


def write_amplification(path: str | Path, amplification: np.ndarray) -> None:
    _write_rows(path, ("site", "amplification"), [(site + 1, float(value)) for site, value in enumerate(amplification)])


def write_selection(path: str | Path, sites: list[int]) -> None:
    Path(path).write_text(json.dumps({"sites": [int(site) for site in sites]}) + "\n", encoding="utf-8")


def read_selection(path: str | Path) -> list[int]:
    """1-based site list from ``{"sites": [...]}`` or a bare JSON list."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise DatasetError(f"selection file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise DatasetError(f"selection file is not valid JSON: {path}") from exc
    sites = doc.get("sites") if isinstance(doc, dict) else doc
    if not isinstance(sites, list) or not sites:
        raise DatasetError("selection file must list at least one site")
    sites = [int(site) for site in sites]
    if len(set(sites)) != len(sites) or min(sites) < 1:
        raise DatasetError("selection sites must be distinct 1-based indices")
    return sorted(sites)


def write_json(path: str | Path, payload: Any) -> None:
    if is_dataclass(payload):
        payload = asdict(payload)
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n", encoding="utf-8")


def write_records(path: str | Path, records: Sequence[Any]) -> None:
    """One CSV row per dataclass record, columns in field order."""
    if not records:
        raise DomainError("no records to write")
    header = list(asdict(records[0]))
    _write_rows(path, header, ([asdict(record)[name] for name in header] for record in records))
