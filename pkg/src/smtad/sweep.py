"""Grid sweep over (M, P) and repeated seeds.

Each cell trains and evaluates one model. Finished cells are journaled as
CELL records as they complete, so an interrupted sweep resumes by skipping
every (M, P, seed) already present in the journal.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from smtad.config import PreprocessConfig, TrainConfig
from smtad.contracts.types import EventType, RawDataset, SweepCellResult
from smtad.core.journal import JournalWriter, iter_events
from smtad.errors import DomainError, NumericalError
from smtad.pipeline import run_experiment

logger = logging.getLogger(__name__)

THREADS_ENV = "SMTAD_THREADS"


@dataclass(frozen=True)
class SweepSummaryRow:
    M: int
    P: int
    runs: int
    failed: int
    n_learnables: int
    auroc_mean: float
    auroc_std: float
    auprc_mean: float
    auprc_std: float
    best_auroc: bool = False
    best_auprc: bool = False


def grid_cells(m_grid: list[int], p_grid: list[int], seeds: list[int]) -> list[tuple[int, int, int]]:
    if not m_grid or not p_grid or not seeds:
        raise DomainError("sweep grid and seed list must be non-empty")
    if min(m_grid) < 1 or min(p_grid) < 1:
        raise DomainError("M and P must be >= 1")
    return [(M, P, seed) for M in m_grid for P in p_grid for seed in seeds]


def worker_count(n_cells: int, env: dict[str, str] | None = None) -> int:
    env = dict(os.environ) if env is None else env
    cap = os.cpu_count() or 1
    raw = env.get(THREADS_ENV)
    if raw:
        try:
            cap = max(1, int(raw))
        except ValueError:
            logger.warning("ignoring non-integer %s=%r", THREADS_ENV, raw)
    return max(1, min(cap, n_cells))


def completed_cells(journal_path: str | Path) -> dict[tuple[int, int, int], SweepCellResult]:
    path = Path(journal_path)
    if not path.exists():
        return {}
    done = {}
    for event_type, payload in iter_events(path):
        if event_type == EventType.CELL:
            done[payload.key] = payload
    return done


def run_cell(
    dataset: RawDataset,
    cell: tuple[int, int, int],
    preprocess: PreprocessConfig,
    config: TrainConfig,
    selection: list[int] | None = None,
) -> SweepCellResult:
    """Train and evaluate one (M, P, seed) cell; a diverged run records NaN metrics."""
    M, P, seed = cell
    run_config = replace(config, seed=seed)
    try:
        result = run_experiment(dataset, (M, P), preprocess, run_config, selection)
    except NumericalError as exc:
        logger.warning("cell M=%d P=%d seed=%d failed: %s", M, P, seed, exc)
        L = len(selection) if selection is not None else dataset.n_features
        return SweepCellResult(
            M=M, P=P, seed=seed, auroc=math.nan, auprc=math.nan, n_pos=0, n_neg=0, n_learnables=M * P * (L + 1),
        )
    metrics = result.metrics
    return SweepCellResult(
        M=M,
        P=P,
        seed=seed,
        auroc=metrics.auroc,
        auprc=metrics.auprc,
        n_pos=metrics.n_pos,
        n_neg=metrics.n_neg,
        n_learnables=result.model.params.n_learnables,
    )


def run_sweep(
    dataset: RawDataset,
    m_grid: list[int],
    p_grid: list[int],
    seeds: list[int],
    preprocess: PreprocessConfig,
    config: TrainConfig,
    journal_path: str | Path,
    selection: list[int] | None = None,
    workers: int | None = None,
) -> list[SweepCellResult]:
    cells = grid_cells(m_grid, p_grid, seeds)
    done = completed_cells(journal_path)
    pending = [cell for cell in cells if cell not in done]
    if done:
        logger.info("resuming sweep: %d of %d cells already journaled", len(cells) - len(pending), len(cells))
    workers = worker_count(len(pending)) if workers is None else max(1, workers)

    writer = JournalWriter(journal_path)
    try:
        if workers == 1:
            for cell in pending:
                result = run_cell(dataset, cell, preprocess, config, selection)
                writer.append(EventType.CELL, result)
                done[cell] = result
        elif pending:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(run_cell, dataset, cell, preprocess, config, selection) for cell in pending]
                try:
                    for future in as_completed(futures):
                        result = future.result()
                        writer.append(EventType.CELL, result)
                        done[result.key] = result
                except KeyboardInterrupt:
                    for future in futures:
                        future.cancel()
                    raise
    finally:
        writer.close()
    return [done[cell] for cell in cells]


def _mean_std(values: np.ndarray) -> tuple[float, float]:
    if values.size == 0:
        return math.nan, math.nan
    ddof = 1 if values.size > 1 else 0
    return float(values.mean()), float(values.std(ddof=ddof))


def summarize(results: list[SweepCellResult]) -> list[SweepSummaryRow]:
    """Per-(M, P) mean and std over seeds, flagging the best cell by each metric."""
    groups: dict[tuple[int, int], list[SweepCellResult]] = {}
    for result in results:
        groups.setdefault((result.M, result.P), []).append(result)

    rows = []
    for (M, P), members in sorted(groups.items()):
        ok = [member for member in members if math.isfinite(member.auroc) and math.isfinite(member.auprc)]
        auroc_mean, auroc_std = _mean_std(np.array([member.auroc for member in ok]))
        auprc_mean, auprc_std = _mean_std(np.array([member.auprc for member in ok]))
        rows.append(
            SweepSummaryRow(
                M=M,
                P=P,
                runs=len(ok),
                failed=len(members) - len(ok),
                n_learnables=members[0].n_learnables,
                auroc_mean=auroc_mean,
                auroc_std=auroc_std,
                auprc_mean=auprc_mean,
                auprc_std=auprc_std,
            )
        )

    scored = [idx for idx, row in enumerate(rows) if row.runs > 0]
    if scored:
        # ties go to the earlier cell in (M, P) order
        best_auroc = max(scored, key=lambda idx: (rows[idx].auroc_mean, -idx))
        best_auprc = max(scored, key=lambda idx: (rows[idx].auprc_mean, -idx))
        rows[best_auroc] = replace(rows[best_auroc], best_auroc=True)
        rows[best_auprc] = replace(rows[best_auprc], best_auprc=True)
    return rows
