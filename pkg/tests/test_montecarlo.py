"""Тесты моделирования Монте-Карло."""

import dataclasses
import math
from fractions import Fraction

import numpy as np
import pytest

from dilute_lab.core.exceptions import ConfigurationError, ContractViolationError
from dilute_lab.core.walks import exact_moment
from dilute_lab.montecarlo.config import EnsembleConfig
from dilute_lab.montecarlo.distributions import (
    Rademacher,
    TwoPointSymmetric,
    UniformSymmetric,
    get_distribution,
)
from dilute_lab.montecarlo.estimator import (
    EnsembleRunner,
    chebyshev_bound,
    compare_asymptotic,
    estimate_moments,
    spectral_norm_study,
    stirling_bound,
    summarize,
)
from dilute_lab.montecarlo.sampler import (
    _upper_indices,
    sample_matrix,
    spectrum,
    trace_powers,
)


def test_distribution_moments():
    assert Rademacher().moments(4) == (1, 1, 1, 1)
    assert UniformSymmetric().moments(3) == (1, Fraction(9, 5), Fraction(27, 7))
    assert UniformSymmetric().bound_squared == 3
    law = TwoPointSymmetric(Fraction(1, 4))
    assert law.moments(3) == (1, 4, 16)
    assert law.bound_squared == 4
    assert get_distribution("two-point", "1/4").describe() == "two-point:1/4"


def test_distribution_errors():
    with pytest.raises(ConfigurationError):
        get_distribution("cauchy")
    with pytest.raises(ConfigurationError):
        get_distribution("two-point")
    with pytest.raises(ConfigurationError):
        TwoPointSymmetric(Fraction(3, 2))


def test_config_validation(small_ensemble):
    with pytest.raises(ConfigurationError):
        dataclasses.replace(small_ensemble, rho=0.0)
    with pytest.raises(ConfigurationError):
        dataclasses.replace(small_ensemble, rho=61.0)
    with pytest.raises(ConfigurationError):
        dataclasses.replace(small_ensemble, samples=0)
    with pytest.raises(ConfigurationError):
        dataclasses.replace(small_ensemble, n=5000)
    assert small_ensemble.u == Fraction(1, 8)


def test_sample_matrix_is_reproducible(small_ensemble):
    first = sample_matrix(small_ensemble, 3)
    second = sample_matrix(small_ensemble, 3)
    other = sample_matrix(small_ensemble, 4)
    assert np.array_equal(first, second)
    assert not np.array_equal(first, other)
    assert np.array_equal(first, first.T)
    assert not np.any(np.diag(first))


def test_upper_index_cache_keeps_one_size(small_ensemble):
    sample_matrix(small_ensemble, 0)
    smaller = dataclasses.replace(small_ensemble, n=30)
    sample_matrix(smaller, 0)
    info = _upper_indices.cache_info()
    assert (info.maxsize, info.currsize) == (1, 1)
    rows, cols = _upper_indices(30)
    assert rows.dtype == cols.dtype == np.int32
    assert rows.size == 30 * 29 // 2


def test_sample_entries_follow_dilution(small_ensemble):
    config = dataclasses.replace(small_ensemble, n=200, rho=10.0)
    nonzero = []
    for index in range(10):
        matrix = sample_matrix(config, index)
        upper = matrix[np.triu_indices(config.n, k=1)]
        nonzero.append(np.count_nonzero(upper))
        assert np.allclose(np.abs(upper[upper != 0]), 1 / math.sqrt(config.rho))
    pairs = config.n * (config.n - 1) / 2
    frequency = sum(nonzero) / (10 * pairs)
    expected = config.rho / config.n
    assert abs(frequency - expected) < 4 * math.sqrt(expected / (10 * pairs))


def test_trace_powers(small_ensemble):
    matrix = sample_matrix(small_ensemble, 0)
    powers = trace_powers(matrix, 3)
    assert powers[0] == pytest.approx(np.sum(matrix * matrix))
    assert powers[1] == pytest.approx(np.trace(np.linalg.matrix_power(matrix, 4)))
    with pytest.raises(ConfigurationError):
        trace_powers(matrix, 0)


def test_spectrum_contract():
    with pytest.raises(ContractViolationError):
        spectrum(np.zeros((2, 3)))
    with pytest.raises(ContractViolationError):
        spectrum(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_threads_do_not_change_results(small_ensemble):
    serial = estimate_moments(small_ensemble, 3)
    threaded = estimate_moments(dataclasses.replace(small_ensemble, threads=4), 3)
    assert serial == threaded


def test_runner_keeps_sample_order(small_ensemble):
    samples = EnsembleRunner(small_ensemble).trace_samples(2)
    assert samples.shape == (small_ensemble.samples, 2)
    expected = trace_powers(sample_matrix(small_ensemble, 5), 2)
    assert np.array_equal(samples[5], expected)


def test_single_sample_has_infinite_stderr():
    estimates = summarize(np.array([[1.0, 2.0]]))
    assert estimates[0].mean == 1.0
    assert math.isinf(estimates[1].stderr)


def test_two_point_law_trace(small_ensemble):
    config = dataclasses.replace(
        small_ensemble, distribution=TwoPointSymmetric(Fraction(1, 2)), samples=200
    )
    estimate = estimate_moments(config, 1)[0]
    exact = exact_moment(config.moment_params(1), 1)
    assert abs(estimate.mean - float(exact)) < 4 * estimate.stderr


def test_compare_columns(small_ensemble):
    rows = compare_asymptotic(small_ensemble, 2)
    assert [row.s for row in rows] == [1, 2]
    assert rows[0].exact == Fraction(small_ensemble.n - 1, small_ensemble.n)
    assert rows[0].series == 1
    assert rows[1].series == 2 + small_ensemble.u
    assert rows[1].catalan == 2


def test_deviation_bounds():
    value, s = stirling_bound(2000, 96.0, Fraction(1), Fraction(1, 4**11), 0.1)
    assert s == 0 and math.isinf(value)
    value, s = stirling_bound(2000, 96.0, Fraction(1), Fraction(1, 4), 0.5)
    assert s == 24 and value < 1
    bound, best_s = chebyshev_bound(2000, Fraction(1, 96), 0.5)
    assert 1 <= best_s <= 64
    assert bound < 1


def test_spectral_study(small_ensemble):
    summary = spectral_norm_study(small_ensemble, [0.1, 0.5], Fraction(1, 4))
    assert len(summary.lambda_max) == small_ensemble.samples
    assert [row.eps for row in summary.bounds] == [0.1, 0.5]
    for row in summary.bounds:
        assert 0 <= row.frequency <= 1
        total = len(summary.lambda_max)
        assert summary.exceedances[row.eps] == round(row.frequency * total)
    with pytest.raises(ConfigurationError):
        spectral_norm_study(small_ensemble, [])


@pytest.mark.slow
def test_sampled_moments_match_exact_engine():
    config = EnsembleConfig(
        n=300,
        rho=10.0,
        distribution=Rademacher(),
        master_seed=42,
        samples=10_000,
    )
    params = config.moment_params(3)
    for estimate in estimate_moments(config, 3):
        exact = float(exact_moment(params, estimate.s))
        assert abs(estimate.mean - exact) <= 4 * estimate.stderr
