from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import yaml

AUTO = "auto"


@dataclass(frozen=True)
class PreprocessConfig:
    discrete_threshold: int = 12
    strict_fit: bool = False
    train_fraction: float = 0.5


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    batch_size: int | str = AUTO
    epochs: int | str = AUTO
    lambda_c: float = 0.01
    lambda_theta: float = 0.001
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    epoch_budget: int = 15000
    large_dataset_rows: int = 10_000
    small_batch: int = 64
    large_batch: int = 512

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.batch_size != AUTO and int(self.batch_size) < 1:
            raise ValueError("batch_size must be >= 1")
        if self.epochs != AUTO and int(self.epochs) < 1:
            raise ValueError("epochs must be >= 1")
        if self.lambda_c < 0 or self.lambda_theta < 0:
            raise ValueError("regularization weights must be >= 0")

    def resolve_batch_size(self, n_train: int) -> int:
        if self.batch_size != AUTO:
            return int(self.batch_size)
        return self.small_batch if n_train < self.large_dataset_rows else self.large_batch

    def resolve_epochs(self, n_train: int) -> int:
        if self.epochs != AUTO:
            return int(self.epochs)
        return epochs_for(self.resolve_batch_size(n_train), n_train, self.epoch_budget)


@dataclass(frozen=True)
class ModelShapeConfig:
    M: int = 4
    P: int = 2


@dataclass(frozen=True)
class AnalysisConfig:
    cohort_size: int = 200
    s_floor: float = 1e-12
    select_threshold: float = 2.0


@dataclass(frozen=True)
class SweepConfig:
    m_grid: tuple[int, ...] = tuple(range(2, 41, 2))
    p_grid: tuple[int, ...] = (1, 2, 3, 4)
    repeats: int = 20


@dataclass(frozen=True)
class DatasetPreset:
    name: str
    label_col: str
    normal_labels: tuple[str, ...]
    features: int | None = None
    train_rows: int | None = None


@dataclass(frozen=True)
class SmtadConfig:
    preprocess: PreprocessConfig = field(default_factory=PreprocessConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    model: ModelShapeConfig = field(default_factory=ModelShapeConfig)
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    datasets: dict[str, DatasetPreset] = field(default_factory=dict)


def epochs_for(batch_size: int, n_train: int, budget: int = 15000) -> int:
    """Epoch count floor(budget * |B| / |T|), never below one."""
    if n_train <= 0:
        raise ValueError("n_train must be > 0")
    return max(1, (budget * batch_size) // n_train)


def _require(data: dict, key: str) -> Any:
    if key not in data:
        raise KeyError(f"Missing config key: {key}")
    return data[key]


def int_or_auto(value: Any) -> int | str:
    if isinstance(value, str) and value.strip().lower() == AUTO:
        return AUTO
    return int(value)


def load_config(path: str) -> SmtadConfig:
    with open(path, "r", encoding="utf-8") as handle:
        raw = yaml.safe_load(handle) or {}

    pre_raw = raw.get("preprocess", {}) or {}
    train_raw = _require(raw, "train")
    model_raw = raw.get("model", {}) or {}
    analysis_raw = raw.get("analysis", {}) or {}
    sweep_raw = raw.get("sweep", {}) or {}

    preprocess = PreprocessConfig(
        discrete_threshold=int(pre_raw.get("discrete_threshold", 12)),
        strict_fit=bool(pre_raw.get("strict_fit", False)),
        train_fraction=float(pre_raw.get("train_fraction", 0.5)),
    )

    train = TrainConfig(
        learning_rate=float(_require(train_raw, "learning_rate")),
        batch_size=int_or_auto(train_raw.get("batch_size", AUTO)),
        epochs=int_or_auto(train_raw.get("epochs", AUTO)),
        lambda_c=float(_require(train_raw, "lambda_c")),
        lambda_theta=float(_require(train_raw, "lambda_theta")),
        seed=int(raw.get("seed", 0)),
        beta1=float(train_raw.get("beta1", 0.9)),
        beta2=float(train_raw.get("beta2", 0.999)),
        eps=float(train_raw.get("eps", 1e-8)),
        epoch_budget=int(train_raw.get("epoch_budget", 15000)),
        large_dataset_rows=int(train_raw.get("large_dataset_rows", 10_000)),
        small_batch=int(train_raw.get("small_batch", 64)),
        large_batch=int(train_raw.get("large_batch", 512)),
    )

    model = ModelShapeConfig(M=int(model_raw.get("M", 4)), P=int(model_raw.get("P", 2)))

    analysis = AnalysisConfig(
        cohort_size=int(analysis_raw.get("cohort_size", 200)),
        s_floor=float(analysis_raw.get("s_floor", 1e-12)),
        select_threshold=float(analysis_raw.get("select_threshold", 2.0)),
    )

    sweep = SweepConfig(
        m_grid=tuple(int(m) for m in sweep_raw.get("m_grid", range(2, 41, 2))),
        p_grid=tuple(int(p) for p in sweep_raw.get("p_grid", (1, 2, 3, 4))),
        repeats=int(sweep_raw.get("repeats", 20)),
    )
    if not sweep.m_grid or not sweep.p_grid:
        raise ValueError("sweep grids must be non-empty")

    datasets: dict[str, DatasetPreset] = {}
    for name, values in (raw.get("datasets", {}) or {}).items():
        values = values or {}
        datasets[str(name)] = DatasetPreset(
            name=str(name),
            label_col=str(_require(values, "label_col")),
            normal_labels=tuple(str(v) for v in _require(values, "normal_labels")),
            features=int(values["features"]) if values.get("features") is not None else None,
            train_rows=int(values["train_rows"]) if values.get("train_rows") is not None else None,
        )

    return SmtadConfig(
        preprocess=preprocess,
        train=train,
        model=model,
        analysis=analysis,
        sweep=sweep,
        datasets=datasets,
    )
