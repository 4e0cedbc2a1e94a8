import csv
import json

import numpy as np
import pytest

from smtad.config import TrainConfig
from smtad.contracts.types import EpochRecord, LossReport
from smtad.errors import DatasetError, DomainError
from smtad.model.params import ModelParams
from smtad.persist.exports import read_scores, read_selection, write_histogram, write_loss_history, write_scores, write_selection
from smtad.persist.model_file import ModelFile, load_model, save_model, snapshot
from smtad.pipeline import normalize_for_model, score_rows
from smtad.preprocess.rank import fit_rank_normalizer


def _model(selection=None) -> tuple[ModelFile, np.ndarray]:
    rng = np.random.default_rng(41)
    raw = np.column_stack([rng.normal(size=200), rng.integers(0, 4, size=200), rng.exponential(size=200)])
    L = len(selection) if selection else 3
    params = ModelParams(theta=rng.uniform(-1.0, 1.0, size=(2, 2, L)), coeff=rng.uniform(-1.0, 1.0, size=(2, 2)))
    model = ModelFile(
        params=params,
        normalizer=fit_rank_normalizer(raw),
        train_config=snapshot(TrainConfig(seed=3)),
        seed=3,
        selection=selection,
        feature_names=("a", "b", "c"),
    )
    return model, raw


def _rows(path) -> list[dict]:
    with open(path, "r", encoding="utf-8", newline="") as handle:
        return list(csv.DictReader(handle))


def test_saved_model_scores_bit_identically(tmp_path):
    model, _ = _model()
    queries = np.random.default_rng(42).normal(size=(1_000, 3))
    path = tmp_path / "model.json"
    save_model(model, path)
    restored = load_model(path)

    assert np.array_equal(restored.params.theta, model.params.theta)
    assert np.array_equal(score_rows(model, queries)["log_score"], score_rows(restored, queries)["log_score"])
    assert restored.train_config["seed"] == 3


def test_saving_twice_is_byte_identical(tmp_path):
    model, _ = _model()
    save_model(model, tmp_path / "a.json")
    save_model(load_model(tmp_path / "a.json"), tmp_path / "b.json")

    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_selected_model_accepts_full_or_selected_width():
    model, raw = _model(selection=[1, 3])

    full = normalize_for_model(model, raw[:5])
    narrow = normalize_for_model(model, raw[:5, [0, 2]])

    assert full.shape == (5, 2)
    assert np.array_equal(full, narrow)
    with pytest.raises(DomainError):
        normalize_for_model(model, raw[:5, :1])


def test_unknown_format_version_rejected(tmp_path):
    model, _ = _model()
    path = tmp_path / "model.json"
    save_model(model, path)
    doc = json.loads(path.read_text(encoding="utf-8"))
    doc["format_version"] = 99
    path.write_text(json.dumps(doc), encoding="utf-8")

    with pytest.raises(DatasetError):
        load_model(path)


def test_selection_files(tmp_path):
    path = tmp_path / "selection.json"
    write_selection(path, [4, 2, 9])
    assert read_selection(path) == [2, 4, 9]

    path.write_text("[3, 1]", encoding="utf-8")
    assert read_selection(path) == [1, 3]

    path.write_text("[0, 1]", encoding="utf-8")
    with pytest.raises(DatasetError):
        read_selection(path)


def test_score_csv_roundtrip_and_histogram(tmp_path):
    scores = {"score": np.array([1.0, 0.25, 0.5]), "log_score": np.log([1.0, 0.25, 0.5])}
    labels = np.array([0, 1, 0])
    write_scores(tmp_path / "scores.csv", ["r0", "r1", "r2"], scores, labels)
    anomaly, read_labels = read_scores(tmp_path / "scores.csv")

    assert np.array_equal(anomaly, -scores["log_score"])
    assert np.array_equal(read_labels, labels)
    assert list(_rows(tmp_path / "scores.csv")[0]) == ["id", "normality_score", "log_score", "anomaly_score", "label"]

    write_histogram(tmp_path / "hist.csv", scores["score"], labels, 1)
    rows = _rows(tmp_path / "hist.csv")
    assert len(rows) == 1
    assert rows[0]["normal"] == "2" and rows[0]["anomalous"] == "1"


def test_loss_history_starts_at_epoch_zero(tmp_path):
    path = tmp_path / "loss.csv"
    write_loss_history(
        path,
        LossReport(nll=1.0, reg=0.1, total=1.1, mean_log_score=-1.0),
        [EpochRecord(epoch=1, nll=0.8, reg=0.1, total=0.9)],
    )
    rows = _rows(path)

    assert [row["epoch"] for row in rows] == ["0", "1"]
    assert float(rows[1]["total"]) == 0.9
