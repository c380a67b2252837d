"""Вспомогательные функции: точная арифметика и валидация параметров."""

from __future__ import annotations

import math
from collections.abc import Iterable
from fractions import Fraction

from dilute_lab.core.exceptions import ConfigurationError, InconsistencyError

Rational = int | Fraction


def parse_fraction(value: str | int | Fraction, name: str = "value") -> Fraction:
    """
    Разобрать точное рациональное число.

    Принимает целые, ``Fraction`` и строки вида ``"3"``, ``"9/5"``,
    ``"0.25"``.

    Args:
        value: Исходное значение
        name: Имя параметра для сообщения об ошибке

    Returns:
        Значение в виде Fraction

    Raises:
        ConfigurationError: Если значение нельзя разобрать
    """
    if isinstance(value, bool):
        raise ConfigurationError(name, f"ожидалось число, получено {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ConfigurationError(name, f"ожидалось конечное число: {value}")
        return Fraction(str(value))
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigurationError(name, f"не рациональное число: {value!r}") from e


def parse_fraction_list(
    value: str | Iterable[str | int | Fraction], name: str = "values"
) -> list[Fraction]:
    """
    Разобрать список рациональных чисел.

    Args:
        value: Строка через запятую (``"1,1,15"``) или последовательность
        name: Имя параметра для сообщения об ошибке

    Returns:
        Список Fraction

    Raises:
        ConfigurationError: Если список пуст или элемент некорректен
    """
    if isinstance(value, str):
        items: list = [part for part in value.split(",") if part.strip()]
    else:
        items = list(value)
    if not items:
        raise ConfigurationError(name, "пустой список")
    return [parse_fraction(item, name) for item in items]


def format_fraction(value: Rational) -> str:
    """Записать рациональное число в виде ``num/den``."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def validate_int(
    name: str, value: object, minimum: int | None = None, maximum: int | None = None
) -> int:
    """
    Проверить целочисленный параметр и его диапазон.

    Args:
        name: Имя параметра
        value: Значение
        minimum: Нижняя граница (включительно)
        maximum: Верхняя граница (включительно)

    Returns:
        Значение как int

    Raises:
        ConfigurationError: Если значение не целое или вне диапазона
    """
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigurationError(name, f"ожидалось целое число, получено {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigurationError(name, f"должно быть не меньше {minimum}: {value}")
    if maximum is not None and value > maximum:
        raise ConfigurationError(name, f"должно быть не больше {maximum}: {value}")
    return value


def exact_div(numerator: int, denominator: int, quantity: str) -> int:
    """
    Целочисленное деление, которое обязано быть точным.

    Args:
        numerator: Делимое
        denominator: Делитель
        quantity: Обозначение вычисляемой величины

    Returns:
        Частное

    Raises:
        InconsistencyError: Если деление даёт остаток
    """
    quotient, remainder = divmod(numerator, denominator)
    if remainder:
        raise InconsistencyError(
            quantity, f"{numerator} не делится на {denominator} нацело"
        )
    return quotient


def as_integer(value: Fraction, quantity: str) -> int:
    """Вернуть целое значение рационального числа или сообщить о расхождении."""
    if value.denominator != 1:
        raise InconsistencyError(quantity, f"ожидалось целое, получено {value}")
    return value.numerator


def falling_factorial(n: int, k: int) -> int:
    """Убывающий факториал n(n-1)...(n-k+1); ноль, если k > n."""
    if k > n:
        return 0
    return math.perm(n, k)
