"""Конфигурация моделирования разреженного ансамбля."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction

from dilute_lab.core.exceptions import ConfigurationError
from dilute_lab.core.models import MomentParams
from dilute_lab.core.utils import validate_int
from dilute_lab.infra.settings import SettingsLoader
from dilute_lab.montecarlo.distributions import EntryDistribution

_SEED_LIMIT = 2**64


@dataclass(frozen=True)
class EnsembleConfig:
    """Описание выборки матриц H^(n,ρ)."""

    n: int
    rho: float
    distribution: EntryDistribution
    master_seed: int
    samples: int
    threads: int = 0

    def __post_init__(self) -> None:
        validate_int("n", self.n, minimum=2)
        validate_int("samples", self.samples, minimum=1)
        validate_int("threads", self.threads, minimum=0)
        validate_int("seed", self.master_seed, minimum=0, maximum=_SEED_LIMIT - 1)
        if not math.isfinite(self.rho) or not 0 < self.rho <= self.n:
            raise ConfigurationError(
                "rho", f"требуется 0 < rho <= n, получено {self.rho}"
            )
        if self.distribution.moment(1) != 1:
            raise ConfigurationError("dist", "закон должен иметь V2 = 1")
        n_dense_max = SettingsLoader().get_int("n_dense_max")
        if self.n > n_dense_max:
            raise ConfigurationError(
                "n", f"плотное разложение ограничено n <= {n_dense_max}"
            )

    @property
    def exact_rho(self) -> Fraction:
        """ρ как точная дробь по его десятичной записи."""
        return Fraction(str(self.rho))

    @property
    def v4(self) -> Fraction:
        return self.distribution.v4

    @property
    def u(self) -> Fraction:
        """u = V₄/ρ, единственный источник V₄ для рядов и точного движка."""
        return self.v4 / self.exact_rho

    @property
    def chi0(self) -> Fraction:
        """χ₀ = 1/(4¹¹·U²)."""
        return 1 / (4**11 * self.distribution.bound_squared)

    @property
    def presence_probability(self) -> float:
        return self.rho / self.n

    def moment_params(self, s_max: int) -> MomentParams:
        """Точные параметры для точного движка: моменты до V_{2·s_max}."""
        return MomentParams(self.n, self.exact_rho, self.distribution.moments(s_max))

    def worker_count(self) -> int:
        """Число потоков: 0 означает настройку по умолчанию или число ядер."""
        threads = self.threads or SettingsLoader().get_int("default_threads")
        if threads <= 0:
            threads = os.cpu_count() or 1
        return max(1, min(threads, self.samples))
