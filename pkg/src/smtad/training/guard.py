from __future__ import annotations

import math
from enum import Enum

import numpy as np

from smtad.contracts.types import EpochRecord, GuardEvent
from smtad.model.params import ModelParams


class GuardState(str, Enum):
    RUN = "RUN"
    DIVERGED = "DIVERGED"


class TrainingGuard:
    """Watches epoch losses; latches DIVERGED on the first non-finite loss or parameter."""

    def __init__(self) -> None:
        self.current_state = GuardState.RUN
        self.last_good: ModelParams | None = None
        self.last_good_epoch: int | None = None
        self.latched = False

    def observe(self, record: EpochRecord, params: ModelParams | None) -> GuardEvent | None:
        prev_state = self.current_state
        reasons: list[str] = []
        if not all(math.isfinite(value) for value in (record.nll, record.reg, record.total)):
            reasons.append("nan_loss")
        if params is None or not (np.isfinite(params.theta).all() and np.isfinite(params.coeff).all()):
            reasons.append("nonfinite_params")

        if self.latched or reasons:
            target = GuardState.DIVERGED
            self.latched = True
        else:
            target = GuardState.RUN
            self.last_good = params
            self.last_good_epoch = record.epoch

        if target == prev_state:
            return None

        self.current_state = target
        return GuardEvent(
            epoch=record.epoch,
            state=target.value,
            prev_state=prev_state.value,
            reason_codes=reasons,
            meta={"last_good_epoch": self.last_good_epoch},
        )

    def diverge(self, epoch: int, reason: str) -> GuardEvent | None:
        """Latch DIVERGED from an error raised inside an epoch."""
        if self.current_state == GuardState.DIVERGED:
            return None
        prev_state = self.current_state
        self.current_state = GuardState.DIVERGED
        self.latched = True
        return GuardEvent(
            epoch=epoch,
            state=GuardState.DIVERGED.value,
            prev_state=prev_state.value,
            reason_codes=[reason],
            meta={"last_good_epoch": self.last_good_epoch},
        )
