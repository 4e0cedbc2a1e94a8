import math

import numpy as np
import pytest

from smtad.analysis.cohort import amplification_ratio, cohort_profiles, select_features, subsample_cohorts
from smtad.analysis.density import pair_rdms, sample_state, single_site_rdm, single_site_rdms
from smtad.analysis.entropy import entropies, mutual_information, sample_profile, von_neumann_entropy
from smtad.contracts.types import Cohort
from smtad.errors import DomainError, EmptySelectionError
from smtad.model.params import ModelParams


def _random_params(rng: np.random.Generator, L: int, M: int, P: int) -> ModelParams:
    return ModelParams(
        theta=rng.uniform(-math.pi, math.pi, size=(M, P, L)),
        coeff=rng.uniform(0.1, 1.0, size=(M, P)),
    )


def test_reduced_density_matrices_are_valid_states():
    rng = np.random.default_rng(5)
    for _ in range(1_000):
        L, M, P = int(rng.integers(2, 7)), int(rng.integers(1, 4)), int(rng.integers(1, 4))
        params = _random_params(rng, L, M, P)
        state = sample_state(params, rng.uniform(0.0, 1.0, size=L))
        singles = single_site_rdms(state)

        assert np.allclose(np.trace(singles, axis1=1, axis2=2), 1.0, atol=1e-9)
        assert np.allclose(singles, np.swapaxes(singles, 1, 2))
        assert np.linalg.eigvalsh(singles).min() >= -1e-10
        single_s = entropies(singles)
        assert np.all((single_s >= -1e-12) & (single_s <= math.log(2.0) + 1e-12))

        k = int(rng.integers(0, L - 1))
        pairs = pair_rdms(state, k)
        for l in range(k + 1, L):
            rho = pairs[l]
            assert math.isclose(float(np.trace(rho)), 1.0, abs_tol=1e-9)
            assert np.linalg.eigvalsh(rho).min() >= -1e-10
            assert 0.0 <= float(entropies(rho)) <= math.log(4.0) + 1e-12
            # tracing out the fast index recovers the slow site
            blocks = rho.reshape(2, 2, 2, 2)
            assert np.allclose(np.einsum("ajbj->ab", blocks), singles[k], atol=1e-9)
            assert np.allclose(np.einsum("iajb->ab", blocks), singles[l], atol=1e-9)


def test_single_product_component_has_no_entanglement():
    rng = np.random.default_rng(6)
    for _ in range(1_000):
        L = int(rng.integers(2, 8))
        params = _random_params(rng, L, 1, 1)
        single, mi = sample_profile(params, rng.uniform(0.0, 1.0, size=L))

        assert np.allclose(single, 0.0, atol=1e-10)
        assert np.allclose(mi, 0.0, atol=1e-10)


def test_mutual_information_is_symmetric_and_nonnegative():
    rng = np.random.default_rng(7)
    params = _random_params(rng, 5, 3, 2)
    x = rng.uniform(0.0, 1.0, size=5)
    single, mi = sample_profile(params, x)

    assert np.all(mi >= 0.0)
    assert np.allclose(mi, mi.T)
    assert np.all(np.diag(mi) == 0.0)
    assert math.isclose(mutual_information(params, x, 3, 1), mi[1, 3], rel_tol=1e-9, abs_tol=1e-12)
    assert math.isclose(von_neumann_entropy(single_site_rdm(params, x, 2)), single[2], rel_tol=1e-9, abs_tol=1e-12)


def test_same_site_pair_rejected():
    params = _random_params(np.random.default_rng(8), 3, 2, 1)

    with pytest.raises(DomainError):
        mutual_information(params, np.full(3, 0.5), 1, 1)


def test_amplification_ratio_floors_the_normal_entropy():
    ratio = amplification_ratio(np.array([0.2, 0.0, 0.3]), np.array([0.1, 0.0, 0.0]), s_floor=1e-12)

    assert np.allclose(ratio, [2.0, 0.0, 0.3e12])


def test_identical_cohorts_have_unit_amplification():
    rng = np.random.default_rng(9)
    params = _random_params(rng, 4, 3, 2)
    rows = rng.uniform(0.0, 1.0, size=(6, 4))
    report = cohort_profiles(params, rows, rows)

    assert report.normal.cohort == Cohort.NORMAL
    assert report.anomalous.n_samples == 6
    assert np.allclose(report.amplification, 1.0)
    assert np.allclose(report.normal_mi.values, report.anomalous_mi.values)


def test_empty_cohort_rejected():
    params = _random_params(np.random.default_rng(10), 3, 2, 1)

    with pytest.raises(DomainError):
        cohort_profiles(params, np.full((2, 3), 0.5), np.zeros((0, 3)))


def test_select_features_is_one_based_and_inclusive():
    assert select_features(np.array([0.5, 2.0, 3.1, 1.9]), 2.0) == [2, 3]
    with pytest.raises(EmptySelectionError):
        select_features(np.array([0.5, 1.0]), 2.0)
    with pytest.raises(DomainError):
        select_features(np.array([0.5, 1.0]), 0.0)


def test_subsample_cohorts_is_seeded_and_capped():
    normal = np.arange(50, dtype=float).reshape(25, 2)
    anomalous = np.arange(8, dtype=float).reshape(4, 2)

    first = subsample_cohorts(normal, anomalous, 10, seed=3)
    second = subsample_cohorts(normal, anomalous, 10, seed=3)

    assert first[0].shape == (10, 2)
    assert np.array_equal(first[0], second[0])
    assert np.array_equal(first[1], anomalous)
