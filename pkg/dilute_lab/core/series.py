"""Точные формальные ряды: уравнение для производящей функции моментов.

Коэффициенты рядов хранятся как многочлены от u = V₄/ρ с рациональными
коэффициентами (``UPolynomial``); ряд по z обрезан на заданном порядке
(``TruncatedSeries``). Вся арифметика точная, на ``fractions.Fraction``.
"""

from __future__ import annotations

import functools
import threading
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from dilute_lab.core.combinatorics import catalan, n_one_multiedge
from dilute_lab.core.exceptions import (
    ConfigurationError,
    ContractViolationError,
    InconsistencyError,
)
from dilute_lab.core.models import CheckKind, CheckReport
from dilute_lab.core.utils import Rational, parse_fraction, validate_int

MAX_PRACTICAL_ORDER = 256


def _as_fraction(value: Rational) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


class UPolynomial:
    """Многочлен от u с точными рациональными коэффициентами.

    Коэффициент с индексом p стоит при u^p. Старший коэффициент всегда
    ненулевой; нулевой многочлен хранится как пустой кортеж.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[Rational] = ()) -> None:
        values = [_as_fraction(c) for c in coeffs]
        while values and values[-1] == 0:
            values.pop()
        self._coeffs: tuple[Fraction, ...] = tuple(values)

    @classmethod
    def zero(cls) -> UPolynomial:
        return cls()

    @classmethod
    def constant(cls, value: Rational) -> UPolynomial:
        return cls((value,))

    @classmethod
    def variable(cls) -> UPolynomial:
        """Многочлен u."""
        return cls((0, 1))

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return self._coeffs

    @property
    def degree(self) -> int:
        """Степень многочлена; -1 для нулевого."""
        return len(self._coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    def __getitem__(self, power: int) -> Fraction:
        if 0 <= power < len(self._coeffs):
            return self._coeffs[power]
        return Fraction(0)

    def __add__(self, other: UPolynomial | Rational) -> UPolynomial:
        other = _as_poly(other)
        size = max(len(self._coeffs), len(other._coeffs))
        return UPolynomial(self[p] + other[p] for p in range(size))

    __radd__ = __add__

    def __neg__(self) -> UPolynomial:
        return UPolynomial(-c for c in self._coeffs)

    def __sub__(self, other: UPolynomial | Rational) -> UPolynomial:
        return self + (-_as_poly(other))

    def __rsub__(self, other: Rational) -> UPolynomial:
        return _as_poly(other) - self

    def __mul__(self, other: UPolynomial | Rational) -> UPolynomial:
        if not isinstance(other, UPolynomial):
            factor = _as_fraction(other)
            return UPolynomial(c * factor for c in self._coeffs)
        if self.is_zero or other.is_zero:
            return UPolynomial()
        product = [Fraction(0)] * (len(self._coeffs) + len(other._coeffs) - 1)
        for i, a in enumerate(self._coeffs):
            if not a:
                continue
            for j, b in enumerate(other._coeffs):
                product[i + j] += a * b
        return UPolynomial(product)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, UPolynomial):
            return self._coeffs == other._coeffs
        if isinstance(other, (int, Fraction)):
            return self._coeffs == UPolynomial.constant(other)._coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def __repr__(self) -> str:
        return f"UPolynomial({[str(c) for c in self._coeffs]})"

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        terms = []
        for power, c in enumerate(self._coeffs):
            if not c:
                continue
            if power == 0:
                terms.append(str(c))
            elif power == 1:
                terms.append(f"{c}u")
            else:
                terms.append(f"{c}u^{power}")
        return " + ".join(terms)

    def evaluate(self, u_value: Rational) -> Fraction:
        """Значение многочлена в точке u (схема Горнера)."""
        result = Fraction(0)
        point = _as_fraction(u_value)
        for c in reversed(self._coeffs):
            result = result * point + c
        return result

    def is_non_negative_integral(self) -> bool:
        return all(c.denominator == 1 and c >= 0 for c in self._coeffs)


def _as_poly(value: UPolynomial | Rational) -> UPolynomial:
    if isinstance(value, UPolynomial):
        return value
    return UPolynomial.constant(value)


class TruncatedSeries:
    """Степенной ряд по z, обрезанный на порядке ``order`` включительно."""

    __slots__ = ("_order", "_coeffs")

    def __init__(
        self, order: int, coeffs: Sequence[UPolynomial | Rational]
    ) -> None:
        if order < 0:
            raise ContractViolationError("TruncatedSeries", f"order >= 0, {order}")
        if len(coeffs) != order + 1:
            raise ContractViolationError(
                "TruncatedSeries",
                f"ожидалось {order + 1} коэффициентов, получено {len(coeffs)}",
            )
        self._order = order
        self._coeffs: tuple[UPolynomial, ...] = tuple(_as_poly(c) for c in coeffs)

    @classmethod
    def zero(cls, order: int) -> TruncatedSeries:
        return cls(order, [UPolynomial()] * (order + 1))

    @classmethod
    def constant(cls, order: int, value: UPolynomial | Rational) -> TruncatedSeries:
        return cls(order, [_as_poly(value)] + [UPolynomial()] * order)

    @property
    def order(self) -> int:
        return self._order

    @property
    def coeffs(self) -> tuple[UPolynomial, ...]:
        return self._coeffs

    def __getitem__(self, s: int) -> UPolynomial:
        return self._coeffs[s]

    def __len__(self) -> int:
        return len(self._coeffs)

    def _check_order(self, other: TruncatedSeries, operation: str) -> None:
        if self._order != other._order:
            raise ContractViolationError(
                operation, f"порядки рядов различаются: {self._order} и {other._order}"
            )

    def __add__(self, other: TruncatedSeries) -> TruncatedSeries:
        self._check_order(other, "series_add")
        return TruncatedSeries(
            self._order, [a + b for a, b in zip(self._coeffs, other._coeffs)]
        )

    def __sub__(self, other: TruncatedSeries) -> TruncatedSeries:
        self._check_order(other, "series_sub")
        return TruncatedSeries(
            self._order, [a - b for a, b in zip(self._coeffs, other._coeffs)]
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self._order == other._order and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash((self._order, self._coeffs))

    def __repr__(self) -> str:
        return f"TruncatedSeries(order={self._order}, coeffs={list(self._coeffs)})"

    def scale(self, factor: UPolynomial | Rational) -> TruncatedSeries:
        """Умножить все коэффициенты на многочлен от u или число."""
        return TruncatedSeries(self._order, [c * factor for c in self._coeffs])

    def shift(self, power: int) -> TruncatedSeries:
        """Умножить на z^power с обрезанием на том же порядке."""
        if power < 0:
            raise ContractViolationError("shift", f"power >= 0, {power}")
        head = [UPolynomial()] * min(power, self._order + 1)
        tail = list(self._coeffs[: max(self._order + 1 - power, 0)])
        return TruncatedSeries(self._order, head + tail)

    def truncate(self, order: int) -> TruncatedSeries:
        """Явно обрезать ряд до меньшего порядка."""
        if order > self._order:
            raise ContractViolationError(
                "truncate", f"нельзя продлить ряд порядка {self._order} до {order}"
            )
        return TruncatedSeries(order, self._coeffs[: order + 1])

    def derivative(self) -> TruncatedSeries:
        """Производная по z; порядок результата на единицу меньше."""
        if self._order == 0:
            raise ContractViolationError("derivative", "порядок ряда должен быть >= 1")
        return TruncatedSeries(
            self._order - 1,
            [self._coeffs[k] * k for k in range(1, self._order + 1)],
        )

    def is_zero(self) -> bool:
        return all(c.is_zero for c in self._coeffs)

    def specialize(self, u_value: Rational) -> TruncatedSeries:
        """Подставить числовое значение u во все коэффициенты."""
        return TruncatedSeries(
            self._order, [c.evaluate(u_value) for c in self._coeffs]
        )


@dataclass(frozen=True)
class SeriesParams:
    """Параметры решения: порядок по z и, возможно, числовое значение u."""

    order: int
    u_value: Fraction | None = None

    def __post_init__(self) -> None:
        validate_int("order", self.order, minimum=0)
        if self.order > MAX_PRACTICAL_ORDER:
            raise ConfigurationError(
                "order", f"порядок больше {MAX_PRACTICAL_ORDER} не поддерживается"
            )
        if self.u_value is not None:
            u_value = parse_fraction(self.u_value, "u")
            if u_value < 0:
                raise ConfigurationError("u", f"должно быть >= 0, получено {u_value}")
            object.__setattr__(self, "u_value", u_value)


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """
    Произведение Коши двух рядов, обрезанное на их общем порядке.

    Raises:
        ContractViolationError: Если порядки рядов различаются
    """
    if a.order != b.order:
        raise ContractViolationError(
            "series_mul", f"порядки рядов различаются: {a.order} и {b.order}"
        )
    result = []
    for s in range(a.order + 1):
        acc = UPolynomial()
        for j in range(s + 1):
            left = a[j]
            if left.is_zero:
                continue
            right = b[s - j]
            if right.is_zero:
                continue
            acc = acc + left * right
        result.append(acc)
    return TruncatedSeries(a.order, result)


def series_geom_inverse(a: TruncatedSeries) -> TruncatedSeries:
    """
    Ряд G = 1/(1 - z·a).

    Коэффициенты находятся из G = 1 + z·a·G: G_k = Σ_{j<k} a_j G_{k-1-j}.
    """
    g: list[UPolynomial] = [UPolynomial.constant(1)]
    for k in range(1, a.order + 1):
        acc = UPolynomial()
        for j in range(k):
            if a[j].is_zero or g[k - 1 - j].is_zero:
                continue
            acc = acc + a[j] * g[k - 1 - j]
        g.append(acc)
    return TruncatedSeries(a.order, g)


@functools.lru_cache(maxsize=None)
def solve_catalan(order: int) -> TruncatedSeries:
    """
    Решение уравнения f = 1 + z·f² (ряд чисел Каталана).

    Коэффициент f_k зависит только от f_0, ..., f_{k-1}, поэтому каждый
    коэффициент вычисляется один раз и уже не меняется при дальнейших
    итерациях.
    """
    validate_int("order", order, minimum=0)
    f: list[Fraction] = [Fraction(1)]
    for k in range(1, order + 1):
        f.append(sum((f[j] * f[k - 1 - j] for j in range(k)), Fraction(0)))
    return TruncatedSeries(order, f)


def moment_recurrence(order: int, u: UPolynomial | None = None) -> TruncatedSeries:
    """Коэффициенты F = 1 + zF² + z²·u·(1 - zF)^{-4} прямой рекуррентностью.

    Вспомогательные ряды G = 1/(1 - zF), G² и G⁴ = (G²)² наращиваются
    синхронно с F: коэффициент при z^s требует G⁴ только до z^{s-2}.
    Служит независимой сверкой для итерации неподвижной точки.
    """
    u = UPolynomial.variable() if u is None else u
    f: list[UPolynomial] = [UPolynomial.constant(1)]
    g: list[UPolynomial] = []
    g2: list[UPolynomial] = []
    g4: list[UPolynomial] = []

    for s in range(1, order + 1):
        acc = UPolynomial()
        for j in range(s):
            acc = acc + f[j] * f[s - 1 - j]

        if s >= 2:
            k = s - 2
            if k == 0:
                g.append(UPolynomial.constant(1))
            else:
                g_k = UPolynomial()
                for j in range(k):
                    g_k = g_k + f[j] * g[k - 1 - j]
                g.append(g_k)
            g2_k = UPolynomial()
            for j in range(k + 1):
                g2_k = g2_k + g[j] * g[k - j]
            g2.append(g2_k)
            g4_k = UPolynomial()
            for j in range(k + 1):
                g4_k = g4_k + g2[j] * g2[k - j]
            g4.append(g4_k)
            acc = acc + u * g4[k]

        f.append(acc)
    return TruncatedSeries(order, f)


# u -> устойчивые коэффициенты решения, найденные итерацией
_fixed_points: dict[Fraction | None, list[UPolynomial]] = {}
_fixed_point_lock = threading.Lock()


def _iterate_fixed_point(order: int, u_value: Fraction | None) -> list[UPolynomial]:
    """Итерация F -> 1 + zF² + z²·u·(1 - zF)^{-4} от F = 1.

    Каждая итерация фиксирует ещё один коэффициент, поэтому ряд считается
    на растущем порядке: итерация k работает на порядке k и добавляет
    коэффициент при z^k. Найденные коэффициенты запоминаются по u.
    """
    u = UPolynomial.variable() if u_value is None else UPolynomial.constant(u_value)
    with _fixed_point_lock:
        stable = _fixed_points.setdefault(u_value, [UPolynomial.constant(1)])
        while len(stable) <= order:
            k = len(stable)
            current = TruncatedSeries(k, [*stable, UPolynomial()])
            step = fixed_point_step(current, u)
            if step.coeffs[:k] != tuple(stable):
                raise InconsistencyError(
                    f"m_{k - 1}", "коэффициент изменился после стабилизации"
                )
            stable.append(step[k])
        return stable[: order + 1]


@functools.lru_cache(maxsize=None)
def solve_moment_series(params: SeriesParams) -> TruncatedSeries:
    """
    Решить уравнение F = 1 + zF² + z²·u·(1 - zF)^{-4} до порядка params.order.

    Решение строится итерацией неподвижной точки от F = 1, множитель
    (1 - zF)^{-4} берётся как четвёртая степень ``series_geom_inverse``.
    Без ``u_value`` коэффициенты остаются многочленами от u; с ним
    ``u`` подставляется как число.

    Raises:
        InconsistencyError: Если коэффициент символьного решения не целый
            или отрицательный
    """
    coefficients = _iterate_fixed_point(params.order, params.u_value)
    if params.u_value is None:
        for s, poly in enumerate(coefficients):
            if not poly.is_non_negative_integral():
                raise InconsistencyError(
                    f"m_{s}", f"коэффициенты не натуральные: {poly}"
                )
    return TruncatedSeries(params.order, coefficients)


def fixed_point_step(
    series: TruncatedSeries, u: UPolynomial | Rational
) -> TruncatedSeries:
    """Одна итерация F -> 1 + zF² + z²·u·(1 - zF)^{-4} на порядке ряда."""
    g = series_geom_inverse(series)
    g2 = series_mul(g, g)
    g4 = series_mul(g2, g2)
    one = TruncatedSeries.constant(series.order, 1)
    return one + series_mul(series, series).shift(1) + g4.scale(u).shift(2)


def moment_equation_residual(
    series: TruncatedSeries, u: UPolynomial | Rational | None = None
) -> TruncatedSeries:
    """Невязка F - 1 - zF² - z²·u·(1 - zF)^{-4}; для решения она нулевая."""
    u = UPolynomial.variable() if u is None else u
    return series - fixed_point_step(series, u)


def phi_12(order: int) -> TruncatedSeries:
    """
    Производящая функция Φ^(1,2)(z) = 2z³f'(z)f³(z) + z²f⁴(z).

    Коэффициент при z^s равен числу древесных путей длины 2s с одним
    ребром кратности 4 и остальными кратности 2.

    Raises:
        ContractViolationError: Если order < 2
    """
    if order < 2:
        raise ContractViolationError("phi_12", f"order >= 2, получено {order}")
    f_ext = solve_catalan(order + 1)
    f_prime = f_ext.derivative()
    f = f_ext.truncate(order)
    f2 = series_mul(f, f)
    f3 = series_mul(f2, f)
    f4 = series_mul(f3, f)
    return series_mul(f_prime, f3).shift(3).scale(2) + f4.shift(2)


def phi_22(order: int) -> TruncatedSeries:
    """
    Производящая функция Φ^(2,2)(z) = (z⁴/2)f''(z)f⁴(z) + 3z⁴f'(z)f⁶(z).

    Промежуточные коэффициенты могут быть полуцелыми, итоговые обязаны
    быть целыми.

    Raises:
        ContractViolationError: Если order < 4
        InconsistencyError: Если итоговый коэффициент не целый
    """
    if order < 4:
        raise ContractViolationError("phi_22", f"order >= 4, получено {order}")
    f_ext = solve_catalan(order + 2)
    f_prime_ext = f_ext.derivative()
    f_second = f_prime_ext.derivative()
    f_prime = f_prime_ext.truncate(order)
    f = f_ext.truncate(order)
    f2 = series_mul(f, f)
    f4 = series_mul(f2, f2)
    f6 = series_mul(f4, f2)
    result = series_mul(f_second, f4).shift(4).scale(Fraction(1, 2)) + series_mul(
        f_prime, f6
    ).shift(4).scale(3)
    for s, poly in enumerate(result.coeffs):
        if not poly.is_non_negative_integral():
            raise InconsistencyError(f"N_{s}^(2,2)", f"не целое значение {poly}")
    return result


def evaluate_coefficient(poly: UPolynomial, u_value: Rational) -> Fraction:
    """
    Точное значение многочлена от u.

    Raises:
        ConfigurationError: Если u_value < 0
    """
    u_value = parse_fraction(u_value, "u")
    if u_value < 0:
        raise ConfigurationError("u", f"должно быть >= 0, получено {u_value}")
    return poly.evaluate(u_value)


def exp_exceeds(
    exponent: Fraction, target: Fraction, max_terms: int = 4096
) -> bool | None:
    """
    Сертифицированное сравнение e^x >= target для x >= 0.

    Частичные суммы ряда Тейлора S_K дают нижнюю оценку e^x, а остаток
    e^x - S_K <= x^{K+1}/(K+1)! · e^x даёт верхнюю оценку
    S_K / (1 - x^{K+1}/(K+1)!), как только последний член меньше 1.

    Returns:
        True, если доказано e^x >= target; False, если доказано e^x < target;
        None, если за max_terms членов сравнение не решено
    """
    partial = Fraction(0)
    term = Fraction(1)
    for k in range(max_terms):
        partial += term
        if partial >= target:
            return True
        term = term * exponent / (k + 1)
        if term < 1 and partial / (1 - term) < target:
            return False
    return None


def check_upper_bound(order: int, u_grid: Sequence[Rational]) -> CheckReport:
    """
    Проверить m̂_s(u)/t_s <= 4·e^{4us} для всех s <= order и u из сетки.

    Прохождение ячейки доказывается рациональной нижней оценкой экспоненты;
    провал доказывается верхней оценкой с остатком. Дополнительно по
    каждой ячейке фиксируется более слабая граница 4·e^{16us}.
    """
    grid = [parse_fraction(u, "u_grid") for u in u_grid]
    if any(u < 0 for u in grid):
        raise ConfigurationError("u_grid", "значения сетки должны быть >= 0")
    series = solve_moment_series(SeriesParams(order))
    report = CheckReport("m_s(u)/t_s <= 4exp(4us)", CheckKind.HARD)
    weak = CheckReport("m_s(u)/t_s <= 4exp(16us)", CheckKind.DIAGNOSTIC)
    for s in range(order + 1):
        t_s = catalan(s)
        for u in grid:
            ratio = series[s].evaluate(u) / t_s
            verdict = exp_exceeds(4 * u * s, ratio / 4)
            report.add(f"s={s},u={u}", ratio, "4exp(4us)", verdict)
            weak_verdict = True if verdict else exp_exceeds(16 * u * s, ratio / 4)
            weak.add(f"s={s},u={u}", ratio, "4exp(16us)", weak_verdict)
    report.related.append(weak)
    return report


def check_lower_bound(order: int) -> CheckReport:
    """
    Проверить [u⁰]m̂_s = t_s и [u¹]m̂_s >= N_s^(1,2) для 2 <= s <= order.

    Для s = 1 член при u отсутствует и строка проходит тривиально. В
    заметках отчёта фиксируется, где [u¹]m̂_s совпадает с N_s^(1,2) точно.

    Raises:
        ContractViolationError: Если order < 2
    """
    if order < 2:
        raise ContractViolationError("check_lower_bound", f"order >= 2, {order}")
    series = solve_moment_series(SeriesParams(order))
    report = CheckReport("m_s >= t_s + u*N_s^(1,2)", CheckKind.HARD)
    exact_matches = 0
    for s in range(1, order + 1):
        poly = series[s]
        if s == 1:
            report.add("s=1", poly, "t_1", poly[0] == 1 and poly[1] == 0)
            continue
        n12 = n_one_multiedge(s, 2)
        passed = poly[0] == catalan(s) and poly[1] >= n12
        report.add(f"s={s}", f"{poly[0]}+{poly[1]}u", f"{catalan(s)}+{n12}u", passed)
        exact_matches += poly[1] == n12
    report.notes.append(
        f"[u^1]m_s == N_s^(1,2) exactly for {exact_matches}/{order - 1}"
    )
    return report
