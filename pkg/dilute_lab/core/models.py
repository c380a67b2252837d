"""Модели данных: параметры моментов, строки отчётов и результаты проверок."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any

from dilute_lab.core.exceptions import ConfigurationError, InconsistencyError
from dilute_lab.core.utils import Rational, parse_fraction, validate_int


class MomentParams:
    """Точные входные данные точного движка моментов: n, ρ и V₂, V₄, V₆, ..."""

    def __init__(
        self, n: int, rho: Rational | str, moments: Iterable[Rational | str]
    ) -> None:
        """
        Инициализация параметров.

        Args:
            n: Размер матрицы
            rho: Параметр разреживания (среднее число ненулевых элементов в строке)
            moments: Чётные моменты V₂, V₄, ... распределения элементов
        """
        self.n = n
        self.rho = rho
        self.moments = moments

    @property
    def n(self) -> int:
        return self._n

    @n.setter
    def n(self, value: int) -> None:
        self._n = validate_int("n", value, minimum=2)

    @property
    def rho(self) -> Fraction:
        return self._rho

    @rho.setter
    def rho(self, value: Rational | str) -> None:
        rho = parse_fraction(value, "rho")
        if rho <= 0 or rho > self._n:
            raise ConfigurationError("rho", f"требуется 0 < rho <= n, получено {rho}")
        self._rho = rho

    @property
    def moments(self) -> tuple[Fraction, ...]:
        return self._moments

    @moments.setter
    def moments(self, values: Iterable[Rational | str]) -> None:
        parsed = tuple(parse_fraction(v, "moments") for v in values)
        if not parsed:
            raise ConfigurationError("moments", "не задан момент V2")
        if any(v < 0 for v in parsed):
            raise ConfigurationError("moments", "чётные моменты неотрицательны")
        self._moments = parsed

    def moment(self, half: int) -> Fraction:
        """
        Вернуть момент V_{2·half}.

        Args:
            half: Половина порядка момента (1 для V₂, 2 для V₄, ...)

        Raises:
            ConfigurationError: Если момент не задан
        """
        if half < 1 or half > len(self._moments):
            raise ConfigurationError(
                "moments",
                f"нужен момент V{2 * half}, задано {len(self._moments)} моментов",
            )
        return self._moments[half - 1]

    @property
    def u(self) -> Fraction:
        """Параметр u = V₄/ρ."""
        return self.moment(2) / self._rho

    def with_size(self, n: int, rho: Rational | None = None) -> MomentParams:
        """Копия с другими n и, при необходимости, ρ."""
        return MomentParams(n, self._rho if rho is None else rho, self._moments)

    def __repr__(self) -> str:
        moments = ",".join(str(v) for v in self._moments)
        return f"MomentParams(n={self._n}, rho={self._rho}, moments=[{moments}])"


@dataclass(frozen=True)
class CorrectionTerm:
    """Точная поправка с подписанными слагаемыми."""

    value: Fraction
    components: dict[str, Fraction]

    def __post_init__(self) -> None:
        total = sum(self.components.values(), Fraction(0))
        if total != self.value:
            raise InconsistencyError(
                "CorrectionTerm", f"сумма слагаемых {total} != {self.value}"
            )


class Provenance(str, Enum):
    """Источник значения в строке отчёта."""

    SERIES = "series"
    ENUMERATION = "enumeration"
    CLOSED_FORM = "closed-form"
    EXACT_ENGINE = "exact-engine"
    MONTE_CARLO = "monte-carlo"


@dataclass(frozen=True)
class ReportRow:
    """Строка отчёта: величина, индексы, значение и источник."""

    quantity: str
    indices: dict[str, Any]
    value: Any
    provenance: Provenance


class CheckKind(str, Enum):
    """Тип проверки: обязательная или диагностическая."""

    HARD = "hard"
    DIAGNOSTIC = "diagnostic"


@dataclass(frozen=True)
class CheckRow:
    """Результат проверки тождества на одном наборе индексов."""

    identity: str
    index: str
    observed: str
    expected: str
    passed: bool | None

    @property
    def status(self) -> str:
        if self.passed is None:
            return "UNDETERMINED"
        return "PASS" if self.passed else "FAIL"


@dataclass
class CheckReport:
    """Набор строк проверки одного тождества."""

    name: str
    kind: CheckKind = CheckKind.HARD
    rows: list[CheckRow] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    related: list[CheckReport] = field(default_factory=list)

    def add(
        self, index: str, observed: object, expected: object, passed: bool | None
    ) -> None:
        self.rows.append(
            CheckRow(self.name, index, str(observed), str(expected), passed)
        )

    @property
    def failures(self) -> list[CheckRow]:
        return [row for row in self.rows if row.passed is False]

    @property
    def undetermined(self) -> list[CheckRow]:
        return [row for row in self.rows if row.passed is None]

    @property
    def passed(self) -> bool:
        return not self.failures

    def extend(self, rows: Sequence[CheckRow]) -> None:
        self.rows.extend(rows)
