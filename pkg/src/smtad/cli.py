from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from smtad.analysis.cohort import cohort_profiles, select_features, subsample_cohorts
from smtad.config import PreprocessConfig, SmtadConfig, TrainConfig, int_or_auto, load_config
from smtad.contracts.types import EventType
from smtad.core.bus import EventBus
from smtad.core.journal import JournalWriter
from smtad.errors import DatasetError, EmptySelectionError, InputError, SmtadError, TrainingDivergedError
from smtad.metrics.ranking import aggregate, evaluate
from smtad.model.params import complexity
from smtad.persist.exports import (
    read_scores,
    read_selection,
    write_amplification,
    write_histogram,
    write_json,
    write_loss_history,
    write_mi,
    write_profiles,
    write_records,
    write_scores,
    write_selection,
)
from smtad.persist.model_file import ModelFile, load_model, save_model, snapshot
from smtad.pipeline import check_preset, normalize_for_model, prepare, repeat_experiment, score_rows
from smtad.preprocess.ingest import LoadedTable, load_csv
from smtad.sweep import run_sweep, summarize
from smtad.training.trainer import train

logger = logging.getLogger("smtad")

DEFAULT_CONFIG = "config/smtad.yaml"
JOURNAL_FILENAME = "journal.jsonl"


def _attach_journal(bus: EventBus, writer: JournalWriter) -> None:
    def _record(event_type: EventType):
        def _handler(payload: object) -> None:
            writer.append(event_type, payload)

        return _handler

    for event_type in (EventType.EPOCH, EventType.GUARD, EventType.METRICS):
        bus.subscribe(event_type, _record(event_type))


def _int_list(text: str) -> list[int]:
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a comma-separated integer list, got {text!r}") from exc


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"YAML config (default {DEFAULT_CONFIG} when present)")
    common.add_argument("--dataset", help="dataset preset name from the config")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--log-level", default="INFO")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--data", help="CSV input")
    data.add_argument("--label-col", help="label column name or 0-based index")
    data.add_argument("--normal-labels", help="comma-separated label values treated as normal")
    data.add_argument("--split", type=float, help="fraction of normal rows used for training")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--M", type=int)
    model.add_argument("--P", type=int)
    model.add_argument("--lr", type=float)
    model.add_argument("--batch", help="auto or a batch size")
    model.add_argument("--epochs", help="auto or an epoch count")
    model.add_argument("--lambda-c", type=float)
    model.add_argument("--lambda-theta", type=float)
    model.add_argument("--select-file", help="JSON list of 1-based feature sites to keep")

    parser = argparse.ArgumentParser(prog="smtad", description="Superposed rotation MPO anomaly detection")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("train", parents=[common, data, model], help="fit a model on the normal training rows")

    score = sub.add_parser("score", parents=[common, data], help="score rows with a saved model")
    score.add_argument("--model", required=True)
    score.add_argument("--hist", type=int, help="also write an N-bin normality-score histogram")

    ev = sub.add_parser("eval", parents=[common, data, model], help="AUROC / AUPRC from scores or repeated runs")
    ev.add_argument("--scores", help="scores CSV with a label column")
    ev.add_argument("--repeat", type=int, help="rerun split, training and evaluation over K seeds")

    analyze = sub.add_parser("analyze", parents=[common, data], help="entropy, mutual information and amplification")
    analyze.add_argument("--model", required=True)
    analyze.add_argument("--threshold", type=float, help="amplification threshold for feature selection")

    sweep = sub.add_parser("sweep", parents=[common, data, model], help="grid search over M and P")
    sweep.add_argument("--m-grid", type=_int_list, help="comma-separated M values")
    sweep.add_argument("--p-grid", type=_int_list, help="comma-separated P values")
    sweep.add_argument("--repeat", type=int, help="seeds per grid cell")
    sweep.add_argument("--workers", type=int, help="worker processes (capped by SMTAD_THREADS)")
    return parser


def _load_settings(args: argparse.Namespace) -> SmtadConfig:
    path = args.config
    if path is None:
        if not Path(DEFAULT_CONFIG).exists():
            return SmtadConfig()
        path = DEFAULT_CONFIG
    try:
        return load_config(path)
    except FileNotFoundError as exc:
        raise InputError(f"config file not found: {path}") from exc
    except (KeyError, ValueError) as exc:
        raise InputError(f"invalid config {path}: {exc}") from exc


def _train_config(args: argparse.Namespace, settings: SmtadConfig) -> TrainConfig:
    overrides = {
        "learning_rate": getattr(args, "lr", None),
        "lambda_c": getattr(args, "lambda_c", None),
        "lambda_theta": getattr(args, "lambda_theta", None),
        "seed": args.seed,
    }
    try:
        if getattr(args, "batch", None) is not None:
            overrides["batch_size"] = int_or_auto(args.batch)
        if getattr(args, "epochs", None) is not None:
            overrides["epochs"] = int_or_auto(args.epochs)
        return replace(settings.train, **{key: value for key, value in overrides.items() if value is not None})
    except ValueError as exc:
        raise InputError(f"invalid training option: {exc}") from exc


def _preprocess_config(args: argparse.Namespace, settings: SmtadConfig) -> PreprocessConfig:
    if getattr(args, "split", None) is None:
        return settings.preprocess
    return replace(settings.preprocess, train_fraction=args.split)


def _load_data(args: argparse.Namespace, settings: SmtadConfig) -> LoadedTable:
    if not args.data:
        raise InputError("--data is required")
    label_col = args.label_col
    normal_labels: tuple[str, ...] = ("0",)
    if args.dataset:
        preset = settings.datasets.get(args.dataset)
        if preset is None:
            raise InputError(f"unknown dataset preset: {args.dataset}")
        label_col = label_col or preset.label_col
        normal_labels = preset.normal_labels
    if args.normal_labels:
        normal_labels = tuple(item.strip() for item in args.normal_labels.split(",") if item.strip())
    return load_csv(args.data, label_col, normal_labels)


def _selection(args: argparse.Namespace) -> list[int] | None:
    path = getattr(args, "select_file", None)
    return read_selection(path) if path else None


def _shape(args: argparse.Namespace, settings: SmtadConfig) -> tuple[int, int]:
    M = args.M if getattr(args, "M", None) is not None else settings.model.M
    P = args.P if getattr(args, "P", None) is not None else settings.model.P
    if M < 1 or P < 1:
        raise InputError("M and P must be >= 1")
    return M, P


def _open_journal(out_dir: Path) -> tuple[EventBus, JournalWriter]:
    bus = EventBus()
    writer = JournalWriter(out_dir / JOURNAL_FILENAME)
    _attach_journal(bus, writer)
    return bus, writer


def cmd_train(args: argparse.Namespace, settings: SmtadConfig, out_dir: Path) -> int:
    loaded = _load_data(args, settings)
    config = _train_config(args, settings)
    M, P = _shape(args, settings)
    selection = _selection(args)
    prepared = prepare(loaded.dataset, _preprocess_config(args, settings), config.seed, selection)
    data = prepared.data
    L = data.values.shape[1]
    if args.dataset:
        check_preset(settings.datasets[args.dataset], loaded.dataset, int(data.train_values.shape[0]))
    logger.info("model cost: %s", complexity(L, M, P))

    def _model(params) -> ModelFile:
        return ModelFile(
            params=params,
            normalizer=prepared.normalizer,
            train_config=snapshot(config),
            seed=config.seed,
            selection=selection,
            feature_names=loaded.dataset.feature_names,
        )

    bus, writer = _open_journal(out_dir)
    try:
        result = train(data, (L, M, P), config, bus=bus)
    except TrainingDivergedError as exc:
        if exc.last_good is not None:
            save_model(_model(exc.last_good), out_dir / "model.last_good.json")
            logger.error("last good parameters written to %s", out_dir / "model.last_good.json")
        raise
    finally:
        writer.close()

    save_model(_model(result.params), out_dir / "model.json")
    write_loss_history(out_dir / "loss_history.csv", result.initial_loss, result.history)
    logger.info("journaled %d epoch records, %d guard events", bus.counts[EventType.EPOCH], bus.counts[EventType.GUARD])
    print(f"Model written: {out_dir / 'model.json'} ({result.params.n_learnables} learnables)")
    return 0


def cmd_score(args: argparse.Namespace, settings: SmtadConfig, out_dir: Path) -> int:
    model = load_model(args.model)
    loaded = _load_data(args, settings)
    dataset = loaded.dataset
    labels = dataset.labels if loaded.has_labels else None
    if dataset.n_rows == 0:
        empty = {"score": np.zeros(0), "log_score": np.zeros(0)}
        write_scores(out_dir / "scores.csv", [], empty, labels)
        print("Scored 0 rows")
        return 0

    scores = score_rows(model, dataset.values)
    write_scores(out_dir / "scores.csv", loaded.row_ids, scores, labels)
    if args.hist is not None:
        write_histogram(out_dir / "histogram.csv", scores["score"], labels, args.hist)
    print(f"Scored {dataset.n_rows} rows: {out_dir / 'scores.csv'}")
    return 0


def cmd_eval(args: argparse.Namespace, settings: SmtadConfig, out_dir: Path) -> int:
    bus, writer = _open_journal(out_dir)
    try:
        if args.scores:
            anomaly_scores, labels = read_scores(args.scores)
            if labels is None:
                raise DatasetError(f"{args.scores} has no label column")
            report = evaluate(anomaly_scores, labels)
            bus.publish(EventType.METRICS, report)
            write_json(out_dir / "metrics.json", report)
            print(f"AUROC {report.auroc:.4f}  AUPRC {report.auprc:.4f}")
            return 0

        loaded = _load_data(args, settings)
        config = _train_config(args, settings)
        reports = repeat_experiment(
            loaded.dataset,
            _shape(args, settings),
            _preprocess_config(args, settings),
            config,
            args.repeat or 1,
            _selection(args),
            bus,
        )
    finally:
        writer.close()

    summary = aggregate(reports)
    write_json(out_dir / "metrics.json", {"runs": [asdict(report) for report in reports], "summary": asdict(summary)})
    print(
        f"AUROC {summary.auroc_mean:.4f} +/- {summary.auroc_std:.4f}  "
        f"AUPRC {summary.auprc_mean:.4f} +/- {summary.auprc_std:.4f}  ({summary.runs} runs)"
    )
    return 0


def cmd_analyze(args: argparse.Namespace, settings: SmtadConfig, out_dir: Path) -> int:
    model = load_model(args.model)
    loaded = _load_data(args, settings)
    if not loaded.has_labels:
        raise DatasetError("analysis needs a label column to form the normal and anomalous cohorts")
    dataset = loaded.dataset
    X = normalize_for_model(model, dataset.values)
    normal = X[dataset.labels == 0]
    anomalous = X[dataset.labels == 1]
    if anomalous.shape[0] == 0:
        raise DatasetError("no anomalous rows to analyze")

    analysis = settings.analysis
    seed = args.seed if args.seed is not None else model.seed
    normal, anomalous = subsample_cohorts(normal, anomalous, analysis.cohort_size, seed)
    report = cohort_profiles(model.params, normal, anomalous, analysis.s_floor)

    write_profiles(out_dir / "entropy_profile.csv", report)
    write_mi(out_dir / "mi_normal.csv", report.normal_mi.values)
    write_mi(out_dir / "mi_anomalous.csv", report.anomalous_mi.values)
    write_amplification(out_dir / "amplification.csv", report.amplification)

    threshold = args.threshold if args.threshold is not None else analysis.select_threshold
    try:
        sites = select_features(report.amplification, threshold)
    except EmptySelectionError as exc:
        logger.warning("%s", exc)
    else:
        if model.selection is not None:
            sites = [model.selection[site - 1] for site in sites]
        write_selection(out_dir / "selection.json", sites)
        print(f"Selected {len(sites)} sites: {sites}")
    print(f"Analysis written to {out_dir}")
    return 0


def cmd_sweep(args: argparse.Namespace, settings: SmtadConfig, out_dir: Path) -> int:
    loaded = _load_data(args, settings)
    config = _train_config(args, settings)
    m_grid = args.m_grid or ([args.M] if args.M is not None else list(settings.sweep.m_grid))
    p_grid = args.p_grid or ([args.P] if args.P is not None else list(settings.sweep.p_grid))
    repeats = args.repeat if args.repeat is not None else settings.sweep.repeats
    seeds = [config.seed + offset for offset in range(repeats)]

    results = run_sweep(
        loaded.dataset,
        m_grid,
        p_grid,
        seeds,
        _preprocess_config(args, settings),
        config,
        out_dir / JOURNAL_FILENAME,
        selection=_selection(args),
        workers=args.workers,
    )
    rows = summarize(results)
    write_records(out_dir / "sweep_cells.csv", results)
    write_records(out_dir / "sweep_summary.csv", rows)
    write_json(out_dir / "sweep_summary.json", [asdict(row) for row in rows])
    for row in rows:
        if row.best_auroc or row.best_auprc:
            flags = ",".join(name for name, on in (("auroc", row.best_auroc), ("auprc", row.best_auprc)) if on)
            print(
                f"best[{flags}] M={row.M} P={row.P}: AUROC {row.auroc_mean:.4f} +/- {row.auroc_std:.4f}  "
                f"AUPRC {row.auprc_mean:.4f} +/- {row.auprc_std:.4f}"
            )
    return 0


COMMANDS = {
    "train": cmd_train,
    "score": cmd_score,
    "eval": cmd_eval,
    "analyze": cmd_analyze,
    "sweep": cmd_sweep,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        settings = _load_settings(args)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](args, settings, out_dir)
    except TrainingDivergedError as exc:
        logger.error("%s (reasons: %s)", exc, ", ".join(exc.reason_codes) or "n/a")
        return exc.exit_code
    except SmtadError as exc:
        logger.error("%s", exc)
        return exc.exit_code
    except KeyboardInterrupt:
        logger.warning("interrupted; journaled results are kept")
        return 130


if __name__ == "__main__":
    sys.exit(main())
