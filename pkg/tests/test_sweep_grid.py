import math

import numpy as np
import pytest

from smtad.config import PreprocessConfig, TrainConfig
from smtad.contracts.types import EventType, RawDataset, SweepCellResult
from smtad.core.journal import iter_events
from smtad.errors import DomainError
from smtad.sweep import grid_cells, run_sweep, summarize, worker_count


def _dataset(seed: int = 0) -> RawDataset:
    rng = np.random.default_rng(seed)
    normal = rng.normal(size=(40, 3))
    anomalous = rng.normal(loc=3.0, size=(10, 3))
    return RawDataset(values=np.vstack([normal, anomalous]), labels=np.array([0] * 40 + [1] * 10))


def _cell(M, P, seed, auroc, auprc) -> SweepCellResult:
    return SweepCellResult(M=M, P=P, seed=seed, auroc=auroc, auprc=auprc, n_pos=5, n_neg=5, n_learnables=M * P * 4)


def test_grid_cells_cover_every_combination():
    assert grid_cells([1], [1], [0]) == [(1, 1, 0)]
    assert len(grid_cells([2, 4], [1, 2], [0, 1])) == 8
    with pytest.raises(DomainError):
        grid_cells([], [1], [0])


def test_worker_count_respects_env_cap():
    assert worker_count(10, {"SMTAD_THREADS": "3"}) == 3
    assert worker_count(2, {"SMTAD_THREADS": "8"}) == 2
    assert worker_count(5, {"SMTAD_THREADS": "zero"}) >= 1


def test_summary_flags_best_cells_separately():
    rows = summarize([
        _cell(2, 1, 0, 0.90, 0.40),
        _cell(2, 1, 1, 0.92, 0.42),
        _cell(4, 1, 0, 0.85, 0.60),
        _cell(4, 1, 1, math.nan, math.nan),
    ])

    assert [(row.M, row.P) for row in rows] == [(2, 1), (4, 1)]
    assert rows[0].best_auroc and not rows[0].best_auprc
    assert rows[1].best_auprc and not rows[1].best_auroc
    assert rows[1].runs == 1 and rows[1].failed == 1
    assert math.isclose(rows[0].auroc_mean, 0.91)


def test_sweep_resumes_from_journal(tmp_path):
    journal = tmp_path / "journal.jsonl"
    config = TrainConfig(batch_size=8, epochs=2)
    preprocess = PreprocessConfig()

    first = run_sweep(_dataset(), [1, 2], [1], [0, 1], preprocess, config, journal, workers=1)
    second = run_sweep(_dataset(), [1, 2], [1], [0, 1], preprocess, config, journal, workers=1)

    assert [cell.key for cell in first] == [(1, 1, 0), (1, 1, 1), (2, 1, 0), (2, 1, 1)]
    assert [cell.auroc for cell in first] == [cell.auroc for cell in second]
    cells = [payload for event_type, payload in iter_events(journal) if event_type == EventType.CELL]
    assert len(cells) == 4
    assert all(0.0 <= cell.auroc <= 1.0 for cell in first)
