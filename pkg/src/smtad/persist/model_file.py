from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any

import numpy as np

from smtad.config import TrainConfig
from smtad.errors import DatasetError
from smtad.model.params import ModelParams
from smtad.preprocess.rank import RankNormalizer

FORMAT_VERSION = 1


@dataclass(frozen=True, eq=False)
class ModelFile:
    """Everything needed to score raw rows again: parameters, normalizer and provenance.

    ``normalizer`` always covers the full input width; ``selection`` (1-based)
    names the sites the parameters were trained on, or is None for all of them.
    """

    params: ModelParams
    normalizer: RankNormalizer
    train_config: dict[str, Any]
    seed: int
    selection: list[int] | None = None
    feature_names: tuple[str, ...] = ()

    @property
    def n_inputs(self) -> int:
        return self.normalizer.n_features

    def site_normalizer(self) -> RankNormalizer:
        if self.selection is None:
            return self.normalizer
        return self.normalizer.restrict(self.selection)


def snapshot(config: TrainConfig) -> dict[str, Any]:
    return asdict(config)


def to_document(model: ModelFile) -> dict[str, Any]:
    params = model.params
    return {
        "format_version": FORMAT_VERSION,
        "L": params.L,
        "M": params.M,
        "P": params.P,
        "n_learnables": params.n_learnables,
        "theta": params.theta.tolist(),
        "coeff": params.coeff.tolist(),
        "normalizer": model.normalizer.to_state(),
        "train_config": model.train_config,
        "seed": model.seed,
        "selection": list(model.selection) if model.selection is not None else None,
        "feature_names": list(model.feature_names),
    }


def from_document(doc: dict[str, Any]) -> ModelFile:
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise DatasetError(f"unsupported model file version: {version!r}")
    try:
        params = ModelParams(
            theta=np.asarray(doc["theta"], dtype=float),
            coeff=np.asarray(doc["coeff"], dtype=float),
        )
        if (params.L, params.M, params.P) != (int(doc["L"]), int(doc["M"]), int(doc["P"])):
            raise DatasetError("model file shape does not match its arrays")
        normalizer = RankNormalizer.from_state(doc["normalizer"])
        selection = doc.get("selection")
        model = ModelFile(
            params=params,
            normalizer=normalizer,
            train_config=dict(doc.get("train_config", {})),
            seed=int(doc["seed"]),
            selection=[int(site) for site in selection] if selection is not None else None,
            feature_names=tuple(doc.get("feature_names", [])),
        )
    except KeyError as exc:
        raise DatasetError(f"model file missing key: {exc.args[0]}") from exc
    expected = len(model.selection) if model.selection is not None else model.n_inputs
    if expected != params.L:
        raise DatasetError(f"model has L={params.L} sites but its normalizer provides {expected}")
    return model


def save_model(model: ModelFile, path: str | Path) -> None:
    """Write the model as sorted-key JSON; floats keep their shortest round-trip repr."""
    text = json.dumps(to_document(model), sort_keys=True, indent=1)
    Path(path).write_text(text + "\n", encoding="utf-8")


def load_model(path: str | Path) -> ModelFile:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise DatasetError(f"model file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise DatasetError(f"model file is not valid JSON: {path}") from exc
    return from_document(doc)
