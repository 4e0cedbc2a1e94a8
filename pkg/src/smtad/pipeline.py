from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from smtad.config import DatasetPreset, PreprocessConfig, TrainConfig
from smtad.contracts.types import EventType, MetricsReport, NormalizedDataset, RawDataset, SplitTag
from smtad.core.bus import EventBus
from smtad.errors import DomainError
from smtad.metrics.ranking import evaluate
from smtad.model.params import complexity
from smtad.model.score import score_batch
from smtad.persist.model_file import ModelFile, snapshot
from smtad.preprocess.rank import RankNormalizer, fit_rank_normalizer, transform
from smtad.preprocess.split import split, split_tags
from smtad.training.trainer import TrainResult, train

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PreparedData:
    normalizer: RankNormalizer
    data: NormalizedDataset
    selection: list[int] | None


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    model: ModelFile
    training: TrainResult
    metrics: MetricsReport
    scores: dict[str, np.ndarray]


def check_selection(selection: list[int] | None, n_features: int) -> None:
    if selection is None:
        return
    if not selection:
        raise DomainError("feature selection is empty")
    if min(selection) < 1 or max(selection) > n_features:
        raise DomainError(f"selection {selection} out of range for {n_features} features")


def prepare(
    dataset: RawDataset,
    preprocess: PreprocessConfig,
    seed: int,
    selection: list[int] | None = None,
) -> PreparedData:
    """Rank-normalize, tag the split and narrow to the selected sites.

    The normalizer is fitted on every row unless ``strict_fit`` restricts it
    to the training rows; it always keeps the full input width.
    """
    check_selection(selection, dataset.n_features)
    if preprocess.strict_fit:
        tags = split_tags(dataset.labels, preprocess.train_fraction, seed)
        train_rows = np.array([tag == SplitTag.TRAIN for tag in tags])
        normalizer = fit_rank_normalizer(dataset.values[train_rows], preprocess.discrete_threshold)
    else:
        normalizer = fit_rank_normalizer(dataset.values, preprocess.discrete_threshold)
    normalized = NormalizedDataset.unsplit(transform(normalizer, dataset.values), dataset.labels)
    data = split(normalized, preprocess.train_fraction, seed)
    if selection is not None:
        data = data.restrict(selection)
    return PreparedData(normalizer=normalizer, data=data, selection=selection)


def normalize_for_model(model: ModelFile, values: np.ndarray) -> np.ndarray:
    """Map raw rows to the model's sites; accepts full-width or already-selected rows."""
    values = np.asarray(values, dtype=float)
    width = values.shape[1] if values.ndim == 2 else -1
    if width == model.n_inputs:
        normalized = transform(model.normalizer, values)
        if model.selection is not None:
            normalized = normalized[:, [site - 1 for site in model.selection]]
        return normalized
    if model.selection is not None and width == len(model.selection):
        return transform(model.site_normalizer(), values)
    raise DomainError(f"input has {width} features, model expects {model.n_inputs}")


def score_rows(model: ModelFile, values: np.ndarray) -> dict[str, np.ndarray]:
    return score_batch(model.params, normalize_for_model(model, values))


def check_preset(preset: DatasetPreset, dataset: RawDataset, n_train: int) -> None:
    if preset.features is not None and preset.features != dataset.n_features:
        logger.warning("dataset %s: expected %d features, found %d", preset.name, preset.features, dataset.n_features)
    if preset.train_rows is not None and preset.train_rows != n_train:
        logger.warning("dataset %s: expected %d training rows, found %d", preset.name, preset.train_rows, n_train)


def run_experiment(
    dataset: RawDataset,
    shape: tuple[int, int],
    preprocess: PreprocessConfig,
    config: TrainConfig,
    selection: list[int] | None = None,
    bus: EventBus | None = None,
    feature_names: tuple[str, ...] = (),
) -> ExperimentResult:
    """Split, train on the normal training rows, then score and rank the held-out rows."""
    M, P = shape
    prepared = prepare(dataset, preprocess, config.seed, selection)
    data = prepared.data
    L = data.values.shape[1]
    logger.info("model cost for L=%d M=%d P=%d: %s", L, M, P, complexity(L, M, P))

    result = train(data, (L, M, P), config, bus=bus)
    test = data.test_mask
    scores = score_batch(result.params, data.values[test])
    metrics = evaluate(-scores["log_score"], data.labels[test], seed=config.seed)
    if bus is not None:
        bus.publish(EventType.METRICS, metrics)
    logger.info("seed %d: AUROC %.4f AUPRC %.4f", config.seed, metrics.auroc, metrics.auprc)

    model = ModelFile(
        params=result.params,
        normalizer=prepared.normalizer,
        train_config=snapshot(config),
        seed=config.seed,
        selection=selection,
        feature_names=feature_names,
    )
    return ExperimentResult(model=model, training=result, metrics=metrics, scores=scores)


def repeat_experiment(
    dataset: RawDataset,
    shape: tuple[int, int],
    preprocess: PreprocessConfig,
    config: TrainConfig,
    repeats: int,
    selection: list[int] | None = None,
    bus: EventBus | None = None,
) -> list[MetricsReport]:
    """Rerun split, training and evaluation under seeds seed, seed+1, ..."""
    if repeats < 1:
        raise DomainError("repeat count must be >= 1")
    reports = []
    for offset in range(repeats):
        run_config = replace(config, seed=config.seed + offset)
        reports.append(run_experiment(dataset, shape, preprocess, run_config, selection, bus).metrics)
    return reports
