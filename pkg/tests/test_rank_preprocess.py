import numpy as np
import pytest

from smtad.contracts.types import FeatureMode, NormalizedDataset, RawDataset, SplitTag
from smtad.errors import DatasetError, DomainError, EmptyTrainingError
from smtad.preprocess.ingest import load_csv
from smtad.preprocess.rank import RankNormalizer, fit_rank_normalizer, transform
from smtad.preprocess.split import split, split_tags


def _column(values) -> np.ndarray:
    return np.asarray(values, dtype=float).reshape(-1, 1)


def test_continuous_feature_uses_average_ranks():
    normalizer = fit_rank_normalizer(_column([10, 20, 20, 30]), discrete_threshold=2)

    assert normalizer.modes == [FeatureMode.CONTINUOUS]
    out = transform(normalizer, _column([10, 20, 30, 25, 5, 40]))
    assert np.allclose(out[:, 0], [0.25, 0.625, 1.0, 0.8125, 0.125, 1.0])


def test_discrete_feature_maps_levels_evenly():
    normalizer = fit_rank_normalizer(_column([1, 1, 2, 3]))

    assert normalizer.modes == [FeatureMode.DISCRETE]
    out = transform(normalizer, _column([1, 2, 3, 1.5, 2.6, 0]))
    assert np.allclose(out[:, 0], [1 / 3, 2 / 3, 1.0, 1 / 3, 1.0, 1 / 3])


def test_constant_feature_maps_to_one():
    normalizer = fit_rank_normalizer(_column([4.0, 4.0, 4.0]))

    assert np.allclose(transform(normalizer, _column([4.0, 9.0])), 1.0)


def test_normalized_values_stay_in_unit_interval():
    rng = np.random.default_rng(0)
    reference = rng.normal(size=(300, 3))
    normalizer = fit_rank_normalizer(reference)
    out = transform(normalizer, rng.normal(scale=3.0, size=(500, 3)))

    assert out.min() > 0.0
    assert out.max() <= 1.0
    assert np.allclose(np.sort(transform(normalizer, reference)[:, 0]), np.arange(1, 301) / 300)


def test_transform_rejects_bad_input():
    normalizer = fit_rank_normalizer(_column([1.0, 2.0]))

    with pytest.raises(DomainError):
        transform(normalizer, np.zeros((2, 2)))
    with pytest.raises(DomainError):
        transform(normalizer, _column([np.nan]))


def test_normalizer_state_restores_transform():
    rng = np.random.default_rng(1)
    reference = np.column_stack([rng.normal(size=40), rng.integers(0, 3, size=40)])
    normalizer = fit_rank_normalizer(reference)
    restored = RankNormalizer.from_state(normalizer.to_state())
    queries = np.column_stack([rng.normal(size=10), rng.integers(0, 4, size=10)])

    assert np.array_equal(transform(normalizer, queries), transform(restored, queries))
    assert restored.restrict([2]).modes == [FeatureMode.DISCRETE]


def test_split_trains_on_half_of_the_normal_rows():
    labels = np.array([0] * 10 + [1] * 3)
    tags = split_tags(labels, 0.5, seed=4)

    assert tags.count(SplitTag.TRAIN) == 5
    assert tags.count(SplitTag.TEST_NORMAL) == 5
    assert all(tag == SplitTag.TEST_ANOMALOUS for tag in tags[10:])
    assert tags == split_tags(labels, 0.5, seed=4)


def test_split_without_training_rows_fails():
    with pytest.raises(EmptyTrainingError):
        split_tags(np.array([0, 1, 1]), 0.5, seed=0)
    with pytest.raises(DomainError):
        split_tags(np.array([0, 0, 1]), 1.0, seed=0)


def test_raw_dataset_rejects_non_binary_labels():
    with pytest.raises(ValueError):
        RawDataset(values=np.zeros((2, 1)), labels=np.array([0, 2]))


def test_load_csv_with_header_and_categorical_column(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("a,color,label\n1.5,red,0\n2.5,blue,1\n3.5,red,0\n", encoding="utf-8")

    table = load_csv(path, "label", ("0",))

    assert table.has_labels
    assert table.dataset.feature_names == ("a", "color")
    assert np.array_equal(table.dataset.labels, [0, 1, 0])
    assert np.array_equal(table.dataset.values[:, 1], [2.0, 1.0, 2.0])


def test_load_csv_without_header_by_index(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("1,2,1.0\n3,4,0\n", encoding="utf-8")

    table = load_csv(path, "-1", ("0",))

    assert table.dataset.values.shape == (2, 2)
    assert np.array_equal(table.dataset.labels, [1, 0])


def test_load_csv_matches_numeric_normal_labels_and_strips_cells(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("a , label\n 1.0 , 0.0\n2.0,1\n\n3.0, 0\n", encoding="utf-8")

    table = load_csv(path, "label", ("0",))

    assert table.dataset.feature_names == ("a",)
    assert np.array_equal(table.dataset.values[:, 0], [1.0, 2.0, 3.0])
    assert np.array_equal(table.dataset.labels, [0, 1, 0])
    assert table.row_ids == ("0", "1", "2")


def test_load_csv_empty_file_gives_empty_table(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("", encoding="utf-8")

    table = load_csv(path, "label")

    assert table.dataset.n_rows == 0
    assert table.has_labels
    assert table.row_ids == ()


def test_load_csv_header_only_keeps_width(tmp_path):
    path = tmp_path / "header.csv"
    path.write_text("f1,f2,label\n", encoding="utf-8")

    table = load_csv(path, "label")

    assert table.dataset.values.shape == (0, 2)
    assert table.dataset.feature_names == ("f1", "f2")


def test_load_csv_rejects_ragged_rows(tmp_path):
    path = tmp_path / "ragged.csv"
    path.write_text("1,2,0\n3,4,5,1\n", encoding="utf-8")

    with pytest.raises(DatasetError):
        load_csv(path, "-1")


def test_load_csv_errors(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("a,label\n1,0\n,1\n", encoding="utf-8")

    with pytest.raises(DatasetError):
        load_csv(path, "label")
    with pytest.raises(DatasetError):
        load_csv(path, "missing")
    with pytest.raises(DatasetError):
        load_csv(tmp_path / "absent.csv", "label")


def test_transform_is_monotone_in_each_feature():
    rng = np.random.default_rng(5)
    for _ in range(200):
        n_ref = int(rng.integers(2, 60))
        reference = np.column_stack([
            rng.normal(size=n_ref),
            rng.integers(0, int(rng.integers(2, 20)), size=n_ref),
        ]).astype(float)
        normalizer = fit_rank_normalizer(reference, discrete_threshold=int(rng.integers(1, 15)))
        queries = np.sort(np.column_stack([rng.normal(scale=2.0, size=50), rng.uniform(-2.0, 22.0, size=50)]), axis=0)

        out = transform(normalizer, queries)

        assert np.all(np.diff(out, axis=0) >= 0.0)


def test_anomalous_rows_never_enter_training():
    rng = np.random.default_rng(6)
    for _ in range(300):
        labels = rng.integers(0, 2, size=int(rng.integers(2, 80)))
        labels[0] = 0
        labels[1] = 0
        fraction = float(rng.uniform(0.5, 0.95))

        tags = split_tags(labels, fraction, seed=int(rng.integers(0, 10_000)))

        assert all(tag != SplitTag.TRAIN for tag, label in zip(tags, labels) if label == 1)
        assert all(tag == SplitTag.TEST_ANOMALOUS for tag, label in zip(tags, labels) if label == 1)
        assert tags.count(SplitTag.TRAIN) == int(np.floor(fraction * np.count_nonzero(labels == 0)))


def test_split_tags_an_unsplit_dataset_once():
    labels = np.array([0, 0, 0, 0, 1])
    data = NormalizedDataset.unsplit(np.full((5, 2), 0.5), labels)

    assert not data.is_split
    assert set(data.tags) == {SplitTag.UNSPLIT}
    tagged = split(data, 0.5, seed=3)
    assert tagged.is_split
    assert tagged.tags == split_tags(labels, 0.5, seed=3)
    with pytest.raises(DomainError):
        split(tagged, 0.5, seed=3)
