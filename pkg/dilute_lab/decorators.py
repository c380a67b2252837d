"""Декораторы для логирования вычислительных операций."""

from __future__ import annotations

import functools
import inspect
import time
from collections.abc import Callable
from typing import Any, TypeVar

from dilute_lab.logging_config import get_logger

_operation_logger = get_logger("operations")

F = TypeVar("F", bound=Callable[..., Any])

# Длинные значения параметров обрезаются в строке лога
_MAX_VALUE_LENGTH = 60


def _format_value(value: Any) -> str:
    text = str(value)
    if len(text) > _MAX_VALUE_LENGTH:
        return text[:_MAX_VALUE_LENGTH] + "..."
    return text


def log_operation(action: str, verbose: bool = False) -> Callable[[F], F]:
    """
    Декоратор для логирования вычислительных операций.

    Пишет одну строку уровня INFO на каждый вызов:
    ``ACTION key=value ... result=OK|ERROR elapsed=...``. Исключения не
    перехватываются, а пробрасываются дальше после записи в лог.

    Args:
        action: Название операции (SERIES, ENUMERATE, EXACT, MC и т.д.)
        verbose: Если True, в лог добавляется краткое описание результата

    Returns:
        Декорированная функция

    Пример:
        @log_operation("EXACT", verbose=True)
        def exact_table(...):
            ...
    """

    def decorator(func: F) -> F:
        signature = inspect.signature(func)

        @functools.wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            try:
                bound = signature.bind_partial(*args, **kwargs)
                params = [
                    f"{name}={_format_value(value)}"
                    for name, value in bound.arguments.items()
                ]
            except TypeError:
                params = []

            log_parts = [action, *params]
            started = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                log_parts.append("result=ERROR")
                log_parts.append(f"error_type='{type(e).__name__}'")
                log_parts.append(f"error_message='{_format_value(e)}'")
                raise
            else:
                log_parts.append("result=OK")
                if verbose:
                    if isinstance(result, (list, tuple)):
                        log_parts.append(f"rows={len(result)}")
                    else:
                        log_parts.append(f"value={_format_value(result)}")
                return result
            finally:
                elapsed = time.perf_counter() - started
                log_parts.append(f"elapsed={elapsed:.3f}s")
                _operation_logger.info(" ".join(log_parts))

        return wrapper  # type: ignore[return-value]

    return decorator
