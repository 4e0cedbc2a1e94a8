from __future__ import annotations

from typing import Any


class SmtadError(Exception):
    """Base class for every error raised by the package."""

    exit_code = 1


class InputError(SmtadError):
    exit_code = 2


class DomainError(InputError, ValueError):
    pass


class DatasetError(InputError):
    pass


class EmptyTrainingError(InputError):
    pass


class UndefinedMetricError(InputError):
    pass


class EmptySelectionError(InputError):
    pass


class NumericalError(SmtadError):
    exit_code = 3


class DegenerateStateError(NumericalError):
    """The output state collapsed: Z fell to or below the floor."""


class NonFiniteGradientError(NumericalError):
    def __init__(self, message: str, diagnostics: dict[str, Any] | None = None) -> None:
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class TrainingDivergedError(NumericalError):
    def __init__(self, message: str, last_good: Any = None, history: list | None = None, reason_codes: list[str] | None = None) -> None:
        super().__init__(message)
        self.last_good = last_good
        self.history = list(history or [])
        self.reason_codes = list(reason_codes or [])
