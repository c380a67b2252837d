"""Оценки моментов и спектральной нормы по выборке матриц."""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from dilute_lab.core.combinatorics import catalan
from dilute_lab.core.exceptions import ConfigurationError, InconsistencyError
from dilute_lab.core.series import (
    SeriesParams,
    evaluate_coefficient,
    solve_moment_series,
)
from dilute_lab.core.walks import enum_limit, exact_moment
from dilute_lab.logging_config import get_logger
from dilute_lab.montecarlo.config import EnsembleConfig
from dilute_lab.montecarlo.sampler import sample_matrix, spectrum, trace_powers

_logger = get_logger(__name__)

# Полоса, в которой ожидается медиана λ_max при больших n и ρ
LAMBDA_BAND = (1.9, 2.4)
# Максимальный порядок момента в оценке Чебышёва
CHEBYSHEV_S_MAX = 64


@dataclass(frozen=True)
class MomentEstimate:
    """Выборочное среднее Tr H^{2s} и его стандартная ошибка."""

    s: int
    mean: float
    stderr: float
    samples: int


@dataclass(frozen=True)
class ComparisonRow:
    """Строка сравнения: Монте-Карло, точный движок и ряд, всё делённое на n."""

    s: int
    mc_mean: float
    mc_stderr: float
    exact: Fraction | None
    series: Fraction
    catalan: int

    @property
    def mc_ratio(self) -> float:
        return self.mc_mean / float(self.series)

    @property
    def exact_ratio(self) -> Fraction | None:
        return None if self.exact is None else self.exact / self.series


@dataclass(frozen=True)
class BoundRow:
    """Эмпирическая частота {λ_max >= 2(1+ε)} и две верхние оценки."""

    eps: float
    frequency: float
    stirling_bound: float
    stirling_s: int
    chebyshev_bound: float
    chebyshev_s: int

    @property
    def stirling_vacuous(self) -> bool:
        return self.stirling_bound >= 1

    @property
    def chebyshev_vacuous(self) -> bool:
        return self.chebyshev_bound >= 1


@dataclass
class SpectralSummary:
    """Распределение λ_max по выборкам и превышения порогов 2(1+ε)."""

    lambda_max: list[float]
    exceedances: dict[float, int] = field(default_factory=dict)
    bounds: list[BoundRow] = field(default_factory=list)
    chi: Fraction = Fraction(0)

    @property
    def median(self) -> float:
        return float(np.median(self.lambda_max))

    @property
    def in_sanity_band(self) -> bool:
        low, high = LAMBDA_BAND
        return low <= self.median <= high


class EnsembleRunner:
    """Координатор выборки: раздаёт номера выборок потокам и собирает результаты."""

    def __init__(self, config: EnsembleConfig) -> None:
        """
        Инициализация координатора.

        Args:
            config: Конфигурация ансамбля
        """
        self.config = config
        self.discarded: list[int] = []

    def _collect(self, task: Callable[[int], np.ndarray | None]) -> np.ndarray:
        indices = range(self.config.samples)
        workers = self.config.worker_count()
        if workers == 1:
            results = [task(index) for index in indices]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(task, indices))

        self.discarded = [i for i, result in zip(indices, results) if result is None]
        if self.discarded:
            _logger.error(
                "Отброшено выборок: %d (номера %s)",
                len(self.discarded),
                self.discarded[:10],
            )
        kept = [result for result in results if result is not None]
        if not kept:
            raise InconsistencyError("samples", "все выборки отброшены")
        # Порядок строк совпадает с порядком номеров выборок
        return np.stack(kept)

    def trace_samples(self, s_max: int) -> np.ndarray:
        """Матрица выборок × s_max значений Tr H^{2s}."""
        _logger.info(
            "Выборка следов: n=%d rho=%s samples=%d s_max=%d",
            self.config.n,
            self.config.rho,
            self.config.samples,
            s_max,
        )
        return self._collect(
            lambda index: trace_powers(sample_matrix(self.config, index), s_max)
        )

    def lambda_max_samples(self) -> np.ndarray:
        """Спектральная норма max |λ_i| каждой выборки."""

        def task(index: int) -> np.ndarray | None:
            eigenvalues = spectrum(sample_matrix(self.config, index))
            if eigenvalues is None:
                return None
            return np.array([np.abs(eigenvalues).max()])

        return self._collect(task)[:, 0]


def summarize(samples: np.ndarray) -> list[MomentEstimate]:
    """Средние и стандартные ошибки по столбцам матрицы выборок."""
    count = samples.shape[0]
    means = samples.mean(axis=0)
    if count > 1:
        stderrs = samples.std(axis=0, ddof=1) / math.sqrt(count)
    else:
        stderrs = np.full(samples.shape[1], math.inf)
    return [
        MomentEstimate(s + 1, float(mean), float(stderr), count)
        for s, (mean, stderr) in enumerate(zip(means, stderrs))
    ]


def estimate_moments(config: EnsembleConfig, s_max: int) -> list[MomentEstimate]:
    """
    Оценить E Tr H^{2s} для s = 1..s_max по config.samples матрицам.

    При одной выборке стандартная ошибка равна бесконечности.
    """
    if s_max < 1:
        raise ConfigurationError("s_max", f"должно быть >= 1: {s_max}")
    return summarize(EnsembleRunner(config).trace_samples(s_max))


def compare_asymptotic(
    config: EnsembleConfig, s_max: int, s_enum_max: int | None = None
) -> list[ComparisonRow]:
    """
    Сравнить M_{2s}/n по выборке с точным моментом и с m̂_s(u), u = V₄/ρ.

    Точный столбец заполняется для s не выше границы перечисления; V₄ для
    ряда и точного движка берётся из закона распределения конфигурации.
    """
    estimates = estimate_moments(config, s_max)
    series = solve_moment_series(SeriesParams(s_max))
    limit = enum_limit(s_enum_max)
    params = config.moment_params(s_max)
    n = Fraction(config.n)
    rows = []
    for estimate in estimates:
        s = estimate.s
        exact = exact_moment(params, s, s_enum_max) / n if s <= limit else None
        rows.append(
            ComparisonRow(
                s=s,
                mc_mean=estimate.mean / config.n,
                mc_stderr=estimate.stderr / config.n,
                exact=exact,
                series=evaluate_coefficient(series[s], config.u),
                catalan=catalan(s),
            )
        )
    return rows


def stirling_bound(
    n: int, rho: float, v4: Fraction, chi: Fraction, eps: float
) -> tuple[float, int]:
    """
    Оценка P(λ_max >= 2(1+ε)) <= 4e^{16V₄χ}·n/(s^{3/2}(1+ε)^{2s}), s = ⌊χρ⌋.

    Returns:
        Значение оценки (inf при s = 0) и использованное s
    """
    s = math.floor(chi * Fraction(str(rho)))
    if s < 1:
        return math.inf, s
    log_value = (
        math.log(4)
        + 16 * float(v4 * chi)
        + math.log(n)
        - 1.5 * math.log(s)
        - 2 * s * math.log1p(eps)
    )
    return math.exp(min(log_value, 700.0)), s


def chebyshev_bound(
    n: int, u: Fraction, eps: float, s_max: int = CHEBYSHEV_S_MAX
) -> tuple[float, int]:
    """
    Оценка Чебышёва n·m̂_s(u)/(2(1+ε))^{2s}, минимизированная по s <= s_max.

    Returns:
        Наименьшее значение и s, на котором оно достигается
    """
    series = solve_moment_series(SeriesParams(s_max))
    best, best_s = math.inf, 0
    for s in range(1, s_max + 1):
        moment = evaluate_coefficient(series[s], u)
        log_value = (
            math.log(n) + math.log(moment) - 2 * s * math.log(2 * (1 + eps))
        )
        value = math.exp(min(log_value, 700.0))
        if value < best:
            best, best_s = value, s
    return best, best_s


def spectral_norm_study(
    config: EnsembleConfig, eps_list: Sequence[float], chi: Fraction | None = None
) -> SpectralSummary:
    """
    Эмпирическое распределение λ_max и оценки вероятности его превышения.

    Для каждого ε считается доля выборок с λ_max >= 2(1+ε) и две оценки:
    в форме со Стирлингом при s = ⌊χρ⌋ (χ по умолчанию χ₀ = 1/(4¹¹U²)) и
    оценка Чебышёва по моментам m̂_s(u). Оценки >= 1 помечаются как
    бессодержательные.
    """
    if not eps_list or any(eps <= 0 for eps in eps_list):
        raise ConfigurationError("eps", "значения eps должны быть > 0")
    chi = config.chi0 if chi is None else chi
    if chi <= 0:
        raise ConfigurationError("chi", f"должно быть > 0: {chi}")

    lambda_max = EnsembleRunner(config).lambda_max_samples()
    summary = SpectralSummary(lambda_max=[float(x) for x in lambda_max], chi=chi)
    total = len(lambda_max)
    for eps in eps_list:
        count = int(np.count_nonzero(lambda_max >= 2 * (1 + eps)))
        summary.exceedances[eps] = count
        stirling, stirling_s = stirling_bound(config.n, config.rho, config.v4, chi, eps)
        chebyshev, chebyshev_s = chebyshev_bound(config.n, config.u, eps)
        summary.bounds.append(
            BoundRow(
                eps=eps,
                frequency=count / total,
                stirling_bound=stirling,
                stirling_s=stirling_s,
                chebyshev_bound=chebyshev,
                chebyshev_s=chebyshev_s,
            )
        )
    _logger.info(
        "Спектральная норма: samples=%d median=%.4f",
        total,
        summary.median,
    )
    return summary
