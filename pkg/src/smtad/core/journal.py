from __future__ import annotations

import json
from dataclasses import fields, is_dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from smtad.contracts.types import EpochRecord, EventType, GuardEvent, MetricsReport, SweepCellResult


def _encode_value(value: Any) -> Any:
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if is_dataclass(value):
        return _encode_dataclass(value)
    if isinstance(value, (list, tuple)):
        return [_encode_value(item) for item in value]
    if isinstance(value, dict):
        return {key: _encode_value(val) for key, val in value.items()}
    return value


def _encode_dataclass(obj: Any) -> dict:
    return {field.name: _encode_value(getattr(obj, field.name)) for field in fields(obj)}


def encode_record(event_type: EventType, payload: Any) -> dict:
    return {
        "event_type": event_type.value,
        "data": _encode_value(payload),
    }


def decode_record(record: dict) -> tuple[EventType, Any]:
    event_type = EventType(record["event_type"])
    data = record.get("data", {})
    if event_type == EventType.EPOCH:
        payload = EpochRecord(
            epoch=int(data["epoch"]),
            nll=float(data["nll"]),
            reg=float(data["reg"]),
            total=float(data["total"]),
        )
    elif event_type == EventType.GUARD:
        payload = GuardEvent(
            epoch=int(data["epoch"]),
            state=str(data.get("state", "")),
            prev_state=str(data.get("prev_state", "")),
            reason_codes=list(data.get("reason_codes", [])),
            meta=dict(data.get("meta", {})),
        )
    elif event_type == EventType.CELL:
        payload = SweepCellResult(
            M=int(data["M"]),
            P=int(data["P"]),
            seed=int(data["seed"]),
            auroc=float(data["auroc"]),
            auprc=float(data["auprc"]),
            n_pos=int(data["n_pos"]),
            n_neg=int(data["n_neg"]),
            n_learnables=int(data["n_learnables"]),
        )
    elif event_type == EventType.METRICS:
        payload = MetricsReport(
            auroc=float(data["auroc"]),
            auprc=float(data["auprc"]),
            n_pos=int(data["n_pos"]),
            n_neg=int(data["n_neg"]),
            seed=int(data["seed"]) if data.get("seed") is not None else None,
        )
    else:
        payload = data
    return event_type, payload


class JournalWriter:
    def __init__(self, path: str | Path) -> None:
        self._path = str(path)
        self._handle = open(self._path, "a", encoding="utf-8")

    def append(self, event_type: EventType, payload: Any) -> None:
        record = encode_record(event_type, payload)
        line = json.dumps(record, separators=(",", ":"))
        self._handle.write(line + "\n")
        self._handle.flush()

    def close(self) -> None:
        if self._handle:
            self._handle.close()
            self._handle = None


def iter_records(path: str | Path) -> Iterable[dict]:
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError:
                # a torn final line from an interrupted run
                continue


def iter_events(path: str | Path) -> Iterable[tuple[EventType, Any]]:
    for record in iter_records(path):
        yield decode_record(record)
