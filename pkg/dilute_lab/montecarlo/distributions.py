"""Законы распределения элементов матрицы a_ij."""

from __future__ import annotations

from abc import ABC, abstractmethod
from fractions import Fraction

import numpy as np

from dilute_lab.core.exceptions import ConfigurationError
from dilute_lab.core.utils import parse_fraction


class EntryDistribution(ABC):
    """Абстрактный симметричный ограниченный закон с V₂ = 1."""

    name: str = ""

    @abstractmethod
    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """
        Сгенерировать выборку значений a_ij.

        Args:
            rng: Генератор случайных чисел
            size: Размер выборки

        Returns:
            Массив float64 длины size
        """

    @abstractmethod
    def moment(self, half: int) -> Fraction:
        """Точный чётный момент V_{2·half} = E a^{2·half}."""

    @property
    @abstractmethod
    def bound_squared(self) -> Fraction:
        """U² = (ess sup |a|)²."""

    def moments(self, count: int) -> tuple[Fraction, ...]:
        """Моменты V₂, V₄, ..., V_{2·count}."""
        return tuple(self.moment(k) for k in range(1, count + 1))

    @property
    def v4(self) -> Fraction:
        return self.moment(2)

    def describe(self) -> str:
        return self.name


class Rademacher(EntryDistribution):
    """Значения ±1 с вероятностью 1/2."""

    name = "rademacher"

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.choice(np.array([-1.0, 1.0]), size=size)

    def moment(self, half: int) -> Fraction:
        return Fraction(1)

    @property
    def bound_squared(self) -> Fraction:
        return Fraction(1)


class UniformSymmetric(EntryDistribution):
    """Равномерный закон на [-√3, √3]; V_{2k} = 3^k/(2k+1)."""

    name = "uniform"

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        edge = np.sqrt(3.0)
        return rng.uniform(-edge, edge, size=size)

    def moment(self, half: int) -> Fraction:
        return Fraction(3**half, 2 * half + 1)

    @property
    def bound_squared(self) -> Fraction:
        return Fraction(3)


class TwoPointSymmetric(EntryDistribution):
    """Значения ±1/√q с вероятностью q/2 каждое и 0 с вероятностью 1-q."""

    name = "two-point"

    def __init__(self, q: Fraction) -> None:
        """
        Инициализация закона.

        Args:
            q: Вероятность ненулевого значения, 0 < q <= 1

        Raises:
            ConfigurationError: Если q вне (0, 1]
        """
        q = parse_fraction(q, "q")
        if not 0 < q <= 1:
            raise ConfigurationError("q", f"требуется 0 < q <= 1, получено {q}")
        self.q = q

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        signs = rng.choice(np.array([-1.0, 1.0]), size=size)
        present = rng.random(size) < float(self.q)
        return signs * present / np.sqrt(float(self.q))

    def moment(self, half: int) -> Fraction:
        return self.q ** (1 - half)

    @property
    def bound_squared(self) -> Fraction:
        return 1 / self.q

    def describe(self) -> str:
        return f"{self.name}:{self.q}"


DISTRIBUTIONS = ("rademacher", "uniform", "two-point")


def get_distribution(name: str, q: Fraction | str | None = None) -> EntryDistribution:
    """
    Получить закон распределения по имени.

    Args:
        name: Имя закона (rademacher, uniform, two-point)
        q: Параметр закона two-point

    Returns:
        Экземпляр EntryDistribution

    Raises:
        ConfigurationError: Если закон неизвестен или не задан параметр
    """
    normalized = name.strip().lower()
    if normalized == "rademacher":
        return Rademacher()
    if normalized in ("uniform", "uniform-symmetric"):
        return UniformSymmetric()
    if normalized in ("two-point", "two-point-symmetric"):
        if q is None:
            raise ConfigurationError("q", "для закона two-point нужен параметр q")
        return TwoPointSymmetric(parse_fraction(q, "q"))
    raise ConfigurationError(
        "dist", f"неизвестный закон '{name}', доступны: {', '.join(DISTRIBUTIONS)}"
    )
