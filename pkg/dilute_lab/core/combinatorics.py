"""Комбинаторика чисел Каталана: рекуррентности и замкнутые формулы.

Каждая величина, для которой известны два способа вычисления, считается
обоими; расхождение означает ошибку переписывания формулы и приводит к
``InconsistencyError``. Деления в факториальных формулах обязаны быть
точными.
"""

from __future__ import annotations

import functools
from fractions import Fraction
from math import factorial

from dilute_lab.core.exceptions import ContractViolationError, InconsistencyError
from dilute_lab.core.models import CheckKind, CheckReport, CorrectionTerm
from dilute_lab.core.utils import Rational, as_integer, exact_div, parse_fraction

CountValue = int


def _require(condition: bool, operation: str, text: str) -> None:
    if not condition:
        raise ContractViolationError(operation, text)


def _agree(quantity: str, first: int, second: int) -> int:
    if first != second:
        raise InconsistencyError(quantity, f"{first} != {second}")
    return first


@functools.lru_cache(maxsize=None)
def catalan(s: int) -> CountValue:
    """Число Каталана t_s = (2s)!/(s!(s+1)!)."""
    _require(s >= 0, "catalan", f"s >= 0, получено {s}")
    return exact_div(factorial(2 * s), factorial(s) * factorial(s + 1), f"t_{s}")


@functools.lru_cache(maxsize=None)
def _root_degree_by_recurrence(s: int, d: int) -> int:
    if d <= 2:
        return catalan(s - 1)
    return _root_degree_by_recurrence(s, d - 1) - _root_degree_by_recurrence(
        s - 1, d - 2
    )


def _root_degree_closed(s: int, d: int) -> int:
    numerator, denominator = 1, 1
    if d % 2:
        m = (d + 1) // 2
        numerator = (2 * m - 1) * catalan(s - m)
        for i in range(1, m):
            numerator *= s + 1 - m - i
            denominator *= s + 1 - i
    else:
        m = d // 2
        numerator = m * catalan(s - m)
        for i in range(1, m):
            numerator *= s - m - i
            denominator *= s + 1 - i
    return exact_div(numerator, denominator, f"t_{s}^({d})")


def catalan_root_degree(s: int, d: int) -> CountValue:
    """
    Число t_s^(d) корневых плоских деревьев с s рёбрами и степенью корня d.

    Вычисляется по рекуррентности t_s^(d) = t_s^(d-1) - t_{s-1}^(d-2) с
    начальными значениями t_s^(1) = t_s^(2) = t_{s-1} и по замкнутой формуле.

    Raises:
        ContractViolationError: Если не выполнено 1 <= d <= s
        InconsistencyError: Если два способа дают разные значения
    """
    _require(1 <= d <= s, "catalan_root_degree", f"1 <= d <= s, получено ({s}, {d})")
    # Заполнение кэша снизу вверх ограничивает глубину рекурсии
    for lower in range(max(d, 3), s):
        _root_degree_by_recurrence(lower, d)
    return _agree(
        f"t_{s}^({d})",
        _root_degree_by_recurrence(s, d),
        _root_degree_closed(s, d),
    )


@functools.lru_cache(maxsize=None)
def _convolution(k: int, p: int) -> int:
    if p == 1:
        return catalan(k)
    return sum(catalan(j) * _convolution(k - j, p - 1) for j in range(k + 1))


def catalan_convolution(k: int, p: int) -> CountValue:
    """
    Свёртка T_k^(p) = Σ_{a_1+...+a_p=k} t_{a_1}···t_{a_p}.

    Проверяются оценка T_k^(p) <= 4^p·t_k и равенство T_k^(p) = t_{k+p}^(p).

    Raises:
        ContractViolationError: Если k < 0 или p < 1
        InconsistencyError: Если оценка или равенство нарушены
    """
    _require(k >= 0 and p >= 1, "catalan_convolution", f"k >= 0, p >= 1: ({k}, {p})")
    for level in range(1, p):
        _convolution(k, level)
    value = _convolution(k, p)
    if value > 4**p * catalan(k):
        raise InconsistencyError(f"T_{k}^({p})", f"{value} > 4^{p}·t_{k}")
    return _agree(f"T_{k}^({p})", value, catalan_root_degree(k + p, p))


def r_sequence(s: int) -> CountValue:
    """
    R_s = 3(2s-2)!/((s-2)!(s+1)!), сверенное с трёхкратной свёрткой T_{s-2}^(3).

    Raises:
        ContractViolationError: Если s < 2
    """
    _require(s >= 2, "r_sequence", f"s >= 2, получено {s}")
    closed = exact_div(
        3 * factorial(2 * s - 2), factorial(s - 2) * factorial(s + 1), f"R_{s}"
    )
    return _agree(f"R_{s}", closed, catalan_convolution(s - 2, 3))


def r_inline_form(s: int) -> Fraction:
    """Вариант t_s·3s/(2(2s-1)); расходится с R_s и используется только в аудите."""
    _require(s >= 2, "r_inline_form", f"s >= 2, получено {s}")
    return Fraction(catalan(s) * 3 * s, 2 * (2 * s - 1))


def n_one_multiedge(s: int, m: int) -> CountValue:
    """Число древесных путей с одним ребром кратности 2m: (2s)!/((s-m)!(s+m)!)."""
    _require(s >= m >= 1, "n_one_multiedge", f"s >= m >= 1, получено ({s}, {m})")
    return exact_div(
        factorial(2 * s), factorial(s - m) * factorial(s + m), f"N_{s}^(1,{m})"
    )


def n_12_closed(s: int) -> CountValue:
    """
    N_s^(1,2) = s·t_s·(1 - 3/(s+2)), сверенное с общей формулой для одного ребра.

    Raises:
        ContractViolationError: Если s < 2
    """
    _require(s >= 2, "n_12_closed", f"s >= 2, получено {s}")
    value = as_integer(
        Fraction(s * catalan(s)) * (1 - Fraction(3, s + 2)), f"N_{s}^(1,2)"
    )
    return _agree(f"N_{s}^(1,2)", value, n_one_multiedge(s, 2))


def _d_closed(k: int, m: int) -> int:
    return exact_div(
        factorial(2 * k), factorial(k - m) * factorial(k + m), f"D_{k}^({m})"
    )


def _e_closed(k: int, m: int) -> int:
    return exact_div(
        factorial(2 * k + 1), factorial(k - m) * factorial(k + m + 1), f"E_{k}^({m})"
    )


def e_closed_printed(k: int, m: int) -> int:
    """Вариант (2k+1)!/((k+1-m)!(k+m)!); не согласован с базой E_k^(1)."""
    return exact_div(
        factorial(2 * k + 1), factorial(k + 1 - m) * factorial(k + m), f"E_{k}^({m})"
    )


@functools.lru_cache(maxsize=None)
def _d_by_recurrence(k: int, m: int) -> int:
    if m == 1:
        return k * catalan(k)
    return _e_by_recurrence(k, m - 1) - _d_by_recurrence(k, m - 1)


@functools.lru_cache(maxsize=None)
def _e_by_recurrence(k: int, m: int) -> int:
    if m == 1:
        return as_integer(Fraction(k * catalan(k + 1), 2), f"E_{k}^(1)")
    return _d_by_recurrence(k + 1, m) - _e_by_recurrence(k, m - 1)


def de_recurrence(k: int, m: int) -> tuple[CountValue, CountValue]:
    """
    Пара (D_k^(m), E_k^(m)) по рекуррентностям.

    D_k^(m) = E_k^(m-1) - D_k^(m-1), E_k^(m) = D_{k+1}^(m) - E_k^(m-1),
    начальные значения D_k^(1) = k·t_k и E_k^(1) = (k/2)·t_{k+1}. Результат
    сверяется с замкнутыми формулами D_k^(m) = (2k)!/((k-m)!(k+m)!) и
    E_k^(m) = (2k+1)!/((k-m)!(k+m+1)!).

    Raises:
        ContractViolationError: Если не выполнено k >= m >= 1
        InconsistencyError: Если рекуррентность и формула расходятся
    """
    _require(k >= m >= 1, "de_recurrence", f"k >= m >= 1, получено ({k}, {m})")
    d_value = _agree(f"D_{k}^({m})", _d_by_recurrence(k, m), _d_closed(k, m))
    e_value = _agree(f"E_{k}^({m})", _e_by_recurrence(k, m), _e_closed(k, m))
    return d_value, e_value


def n_hat_22(s: int) -> CountValue:
    """Ň_s^(2,2) = 4(2s)!/((s-4)!(s+4)!)."""
    _require(s >= 4, "n_hat_22", f"s >= 4, получено {s}")
    return exact_div(
        4 * factorial(2 * s), factorial(s - 4) * factorial(s + 4), f"Ň_{s}^(2,2)"
    )


def first_correction(
    s: int, v4: Rational, v6: Rational, rho: Rational
) -> CorrectionTerm:
    """
    Главные члены первой поправки: Ň_s^(2,2)·V₄²/ρ + N_s^(1,3)·V₆/ρ.

    Остаток более высокого порядка по 1/ρ не включается.

    Raises:
        ContractViolationError: Если s < 4 или rho <= 0
    """
    v4 = parse_fraction(v4, "V4")
    v6 = parse_fraction(v6, "V6")
    rho = parse_fraction(rho, "rho")
    _require(s >= 4, "first_correction", f"s >= 4, получено {s}")
    _require(rho > 0, "first_correction", f"rho > 0, получено {rho}")
    components = {
        "V4^2": n_hat_22(s) * v4 * v4 / rho,
        "V6": n_one_multiedge(s, 3) * v6 / rho,
    }
    return CorrectionTerm(sum(components.values(), Fraction(0)), components)


def check_exit_degree_bound(s_max: int) -> CheckReport:
    """
    Аудит неравенства 4^d·t_s^(d) <= 3^d·t_s для 1 <= d <= s <= s_max.

    Неравенство записано в целых числах. Нарушения не бросают исключений,
    а попадают в отчёт построчно.
    """
    _require(s_max >= 1, "check_exit_degree_bound", f"s_max >= 1, {s_max}")
    report = CheckReport("4^d t_s^(d) <= 3^d t_s", CheckKind.DIAGNOSTIC)
    for s in range(1, s_max + 1):
        t_s = catalan(s)
        for d in range(1, s + 1):
            lhs = 4**d * catalan_root_degree(s, d)
            rhs = 3**d * t_s
            report.add(f"s={s},d={d}", lhs, rhs, lhs <= rhs)
    failing = [row.index for row in report.failures]
    report.notes.append(
        "нарушения: " + (", ".join(failing) if failing else "нет")
    )
    return report


def check_identities(limit: int) -> list[CheckReport]:
    """
    Набор точных тождеств между рекуррентностями и замкнутыми формулами.

    Каждое тождество проверяется на всех индексах до ``limit``; расхождение
    фиксируется в строке отчёта, а не прерывает проверку.

    Args:
        limit: Верхняя граница для s и k

    Returns:
        Отчёты по тождествам
    """
    checks = [
        ("t_s^(d): recurrence == closed form", _rows_root_degree),
        ("D/E recurrence == closed forms", _rows_de),
        ("N_s^(1,2) closed == (2s)!/((s-2)!(s+2)!)", _rows_n12),
        ("R_s == T_(s-2)^(3)", _rows_r),
    ]
    reports = []
    for name, rows in checks:
        report = CheckReport(name, CheckKind.HARD)
        for index, thunk in rows(limit):
            try:
                value = thunk()
                report.add(index, value, value, True)
            except InconsistencyError as e:
                report.add(index, e.detail, e.quantity, False)
        reports.append(report)
    return reports


def _rows_root_degree(limit: int):
    for s in range(1, limit + 1):
        for d in range(1, s + 1):
            yield f"s={s},d={d}", functools.partial(catalan_root_degree, s, d)


def _rows_de(limit: int):
    for k in range(1, limit + 1):
        for m in range(1, k + 1):
            yield f"k={k},m={m}", functools.partial(de_recurrence, k, m)


def _rows_n12(limit: int):
    for s in range(2, limit + 1):
        yield f"s={s}", functools.partial(n_12_closed, s)


def _rows_r(limit: int):
    for s in range(2, limit + 1):
        yield f"s={s}", functools.partial(r_sequence, s)


def check_convolution_bound(k_max: int, p_max: int) -> CheckReport:
    """Проверить T_k^(p) <= 4^p·t_k и рекуррентность свёртки по p."""
    report = CheckReport("T_k^(p) <= 4^p t_k", CheckKind.HARD)
    for k in range(k_max + 1):
        for p in range(1, p_max + 1):
            value = _convolution(k, p)
            bound = 4**p * catalan(k)
            recursive = (
                catalan(k)
                if p == 1
                else sum(catalan(j) * _convolution(k - j, p - 1) for j in range(k + 1))
            )
            passed = value <= bound and value == recursive
            report.add(f"k={k},p={p}", value, f"<= {bound}", passed)
    return report


# Исходные кэшированные функции, а не атрибуты модуля
_CACHED = (
    catalan,
    _root_degree_by_recurrence,
    _convolution,
    _d_by_recurrence,
    _e_by_recurrence,
)


def clear_caches() -> None:
    """Сбросить кэши; значения после сброса вычисляются заново и не меняются."""
    for cached in _CACHED:
        cached.cache_clear()
