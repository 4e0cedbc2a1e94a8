from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from smtad.contracts.types import RawDataset
from smtad.errors import DatasetError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LoadedTable:
    dataset: RawDataset
    has_labels: bool
    row_ids: tuple[str, ...]


def _all_numeric(cells: pd.Series) -> bool:
    return bool(pd.to_numeric(cells, errors="coerce").notna().all())


def _normal_mask(labels: pd.Series, normal_labels: tuple[str, ...]) -> np.ndarray:
    """Label cells equal to a normal label, as text or as a number ("0" matches "0.0")."""
    mask = labels.isin(normal_labels)
    numeric_normals = pd.to_numeric(pd.Series(normal_labels, dtype=object), errors="coerce").dropna()
    if not numeric_normals.empty:
        mask |= pd.to_numeric(labels, errors="coerce").isin(numeric_normals.tolist())
    return mask.to_numpy()


def _resolve_label(label_col: str | int, columns: list[str], has_header: bool) -> int:
    if has_header and str(label_col) in columns:
        return columns.index(str(label_col))
    if isinstance(label_col, int) or str(label_col).lstrip("-").isdigit():
        index = int(label_col)
        if index < 0:
            index += len(columns)
        if 0 <= index < len(columns):
            return index
    raise DatasetError(f"label column {label_col!r} not found")


def _encode_column(column: pd.Series, name: str) -> np.ndarray:
    if _all_numeric(column):
        return pd.to_numeric(column).to_numpy(dtype=float)
    # categorical levels are coded 1..D in sorted order
    codes, levels = pd.factorize(column, sort=True)
    logger.info("column %s treated as categorical with %d levels", name, len(levels))
    return codes.astype(float) + 1.0


def _empty_table(label_col: str | int | None) -> LoadedTable:
    dataset = RawDataset(values=np.zeros((0, 0)), labels=np.zeros(0, dtype=int))
    return LoadedTable(dataset=dataset, has_labels=label_col is not None, row_ids=())


def load_csv(
    path: str | Path,
    label_col: str | int | None,
    normal_labels: tuple[str, ...] = ("0",),
    has_header: bool | None = None,
) -> LoadedTable:
    """Read a comma-separated UTF-8 table with an optional header row.

    Rows whose label is in ``normal_labels`` become label 0, every other
    label becomes 1. Without a label column every row is labelled 0. An
    empty file gives an empty table.
    """
    try:
        frame = pd.read_csv(path, header=None, dtype=str, encoding="utf-8", skip_blank_lines=True)
    except FileNotFoundError as exc:
        raise DatasetError(f"data file not found: {path}") from exc
    except pd.errors.EmptyDataError:
        return _empty_table(label_col)
    except pd.errors.ParserError as exc:
        raise DatasetError(f"rows have inconsistent column counts: {exc}") from exc

    # whitespace-only cells count as missing
    frame = frame.replace(r"^\s+|\s+$", "", regex=True).replace("", np.nan)
    frame = frame.dropna(how="all").reset_index(drop=True)
    if frame.empty:
        return _empty_table(label_col)

    first = frame.iloc[0]
    if has_header is None:
        has_header = not _all_numeric(first) and (
            len(frame) == 1 or _all_numeric(frame.iloc[1]) or str(label_col) in first.tolist()
        )
    if has_header:
        frame.columns = [str(name) for name in first.tolist()]
        frame = frame.iloc[1:].reset_index(drop=True)
    columns = [str(name) for name in frame.columns]

    label_index = _resolve_label(label_col, columns, has_header) if label_col is not None else None
    feature_idx = [idx for idx in range(len(columns)) if idx != label_index]
    names = tuple(columns[idx] for idx in feature_idx) if has_header else tuple(f"x{pos + 1}" for pos in range(len(feature_idx)))

    missing = frame.isna().any()
    if missing.any():
        column = columns[int(np.flatnonzero(missing.to_numpy())[0])]
        raise DatasetError(f"missing value in column {column!r}")

    features = frame.iloc[:, feature_idx]
    if len(frame):
        values = np.column_stack([_encode_column(features.iloc[:, pos], names[pos]) for pos in range(len(feature_idx))]) if feature_idx else np.zeros((len(frame), 0))
    else:
        values = np.zeros((0, len(feature_idx)))

    if label_index is None:
        labels = np.zeros(len(frame), dtype=int)
    else:
        labels = np.where(_normal_mask(frame.iloc[:, label_index], normal_labels), 0, 1).astype(int)

    row_ids = tuple(str(idx) for idx in range(len(frame)))
    dataset = RawDataset(values=values, labels=labels, feature_names=names)
    logger.debug("loaded %s: %d rows, %d features", path, dataset.n_rows, dataset.n_features)
    return LoadedTable(dataset=dataset, has_labels=label_index is not None, row_ids=row_ids)
