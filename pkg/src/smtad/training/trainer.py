from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from smtad.config import TrainConfig
from smtad.contracts.types import EpochRecord, EventType, LossReport, NormalizedDataset
from smtad.core.bus import EventBus
from smtad.core.seeds import SeedStreams
from smtad.errors import DomainError, EmptyTrainingError, NumericalError, TrainingDivergedError
from smtad.model.params import ModelParams
from smtad.training.guard import GuardState, TrainingGuard
from smtad.training.loss import loss, loss_and_gradient
from smtad.training.optimizer import OptimizerState, adam_step

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TrainResult:
    params: ModelParams
    history: list[EpochRecord]
    initial_loss: LossReport
    epochs: int
    batch_size: int
    n_train: int


def _train_rows(data: NormalizedDataset | np.ndarray) -> np.ndarray:
    if isinstance(data, NormalizedDataset):
        if not data.is_split:
            raise DomainError("dataset must be split before training")
        return data.train_values
    return np.asarray(data, dtype=float)


def train(
    data: NormalizedDataset | np.ndarray,
    model_shape: tuple[int, int, int],
    config: TrainConfig,
    bus: EventBus | None = None,
) -> TrainResult:
    """Fit (L, M, P) parameters on the train-tagged rows only.

    Every epoch is a fresh permutation of the training rows cut into
    mini-batches (the last short batch is kept); one Adam step per batch.
    """
    L, M, P = model_shape
    X = _train_rows(data)
    if X.ndim != 2 or X.shape[0] == 0:
        raise EmptyTrainingError("no training rows")
    if X.shape[1] != L:
        raise DomainError(f"training data has {X.shape[1]} features, model expects {L}")

    n_train = X.shape[0]
    batch_size = config.resolve_batch_size(n_train)
    epochs = config.resolve_epochs(n_train)
    streams = SeedStreams(config.seed)
    shuffle_rng = streams.generator("shuffle")
    params = ModelParams.initialize(L, M, P, streams.generator("init"))
    state = OptimizerState.zeros(params)

    initial = loss(params, X, config.lambda_c, config.lambda_theta)
    guard = TrainingGuard()
    guard.observe(EpochRecord(epoch=0, nll=initial.nll, reg=initial.reg, total=initial.total), params)
    logger.info(
        "training L=%d M=%d P=%d (%d learnables) on %d rows: %d epochs, batch %d",
        L, M, P, params.n_learnables, n_train, epochs, batch_size,
    )

    history: list[EpochRecord] = []
    for epoch in range(1, epochs + 1):
        order = shuffle_rng.permutation(n_train)
        nll_sum = reg_sum = 0.0
        try:
            for start in range(0, n_train, batch_size):
                batch = X[order[start : start + batch_size]]
                report, grads = loss_and_gradient(params, batch, config.lambda_c, config.lambda_theta)
                params, state = adam_step(params, grads, state, config)
                nll_sum += report.nll * batch.shape[0]
                reg_sum += report.reg * batch.shape[0]
        except NumericalError as exc:
            event = guard.diverge(epoch, type(exc).__name__)
            if bus is not None and event is not None:
                bus.publish(EventType.GUARD, event)
            raise TrainingDivergedError(
                f"training diverged in epoch {epoch}: {exc}",
                last_good=guard.last_good,
                history=history,
                reason_codes=event.reason_codes if event else [],
            ) from exc

        nll = nll_sum / n_train
        reg = reg_sum / n_train
        record = EpochRecord(epoch=epoch, nll=nll, reg=reg, total=nll + reg)
        event = guard.observe(record, params)
        if bus is not None:
            if event is not None:
                bus.publish(EventType.GUARD, event)
            bus.publish(EventType.EPOCH, record)
        if guard.current_state == GuardState.DIVERGED:
            raise TrainingDivergedError(
                f"training diverged in epoch {epoch}",
                last_good=guard.last_good,
                history=history,
                reason_codes=event.reason_codes if event else [],
            )
        history.append(record)
        logger.debug("epoch %d: nll=%.6f reg=%.6f", epoch, nll, reg)

    if history:
        logger.info("final epoch loss %.6f (initial %.6f)", history[-1].total, initial.total)
    return TrainResult(
        params=params,
        history=history,
        initial_loss=initial,
        epochs=epochs,
        batch_size=batch_size,
        n_train=n_train,
    )
