"""Генерация матриц разреженного ансамбля и их следов."""

from __future__ import annotations

import functools

import numpy as np

from dilute_lab.core.exceptions import ConfigurationError, ContractViolationError
from dilute_lab.infra.settings import SettingsLoader
from dilute_lab.logging_config import get_logger
from dilute_lab.montecarlo.config import EnsembleConfig

_logger = get_logger(__name__)


def sample_generator(master_seed: int, sample_index: int) -> np.random.Generator:
    """
    Независимый генератор для выборки с номером sample_index.

    Ключ порождения (sample_index,) у SeedSequence даёт одну и ту же
    последовательность при любом порядке и параллельности вычислений.
    """
    sequence = np.random.SeedSequence(master_seed, spawn_key=(sample_index,))
    return np.random.Generator(np.random.Philox(sequence))


# Один набор индексов: при n = 4000 это около 8M пар
@functools.lru_cache(maxsize=1)
def _upper_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    rows, cols = (idx.astype(np.int32) for idx in np.triu_indices(n, k=1))
    rows.setflags(write=False)
    cols.setflags(write=False)
    return rows, cols


def sample_matrix(config: EnsembleConfig, sample_index: int) -> np.ndarray:
    """
    Матрица H^(n,ρ) с номером sample_index.

    Каждая пара {i, j}, i < j, присутствует независимо с вероятностью ρ/n и
    тогда равна a_ij/√ρ. Диагональ нулевая, матрица симметрична.
    """
    if sample_index < 0:
        raise ConfigurationError("sample_index", f"должен быть >= 0: {sample_index}")
    rng = sample_generator(config.master_seed, sample_index)
    rows, cols = _upper_indices(config.n)
    present = rng.random(rows.size) < config.presence_probability
    values = config.distribution.sample(rng, int(present.sum()))
    upper = np.zeros((config.n, config.n))
    upper[rows[present], cols[present]] = values / np.sqrt(config.rho)
    return upper + upper.T


def spectrum(matrix: np.ndarray) -> np.ndarray | None:
    """
    Собственные значения симметричной матрицы.

    Returns:
        Массив собственных значений или None, если разложение не сошлось

    Raises:
        ContractViolationError: Если матрица не квадратная или не симметричная
        ConfigurationError: Если размер больше n_dense_max
    """
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ContractViolationError(
            "spectrum", f"нужна квадратная матрица, {matrix.shape}"
        )
    if not np.array_equal(matrix, matrix.T):
        raise ContractViolationError("spectrum", "матрица не симметрична")
    n_dense_max = SettingsLoader().get_int("n_dense_max")
    if matrix.shape[0] > n_dense_max:
        raise ConfigurationError(
            "n", f"плотное разложение ограничено n <= {n_dense_max}"
        )
    try:
        return np.linalg.eigvalsh(matrix)
    except np.linalg.LinAlgError as e:
        _logger.error("Разложение не сошлось, выборка отброшена: %s", e)
        return None


def trace_powers(matrix: np.ndarray, s_max: int) -> np.ndarray | None:
    """
    Следы Tr H^{2s} = Σ λ_i^{2s} для s = 1..s_max.

    Returns:
        Массив длины s_max или None, если разложение не сошлось
    """
    if s_max < 1:
        raise ConfigurationError("s_max", f"должно быть >= 1: {s_max}")
    eigenvalues = spectrum(matrix)
    if eigenvalues is None:
        return None
    squares = eigenvalues * eigenvalues
    powers = np.empty(s_max)
    current = np.ones_like(squares)
    for s in range(s_max):
        current = current * squares
        powers[s] = current.sum()
    return powers
