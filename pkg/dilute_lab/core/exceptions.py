"""Пользовательские исключения для обработки ошибок."""


class ConfigurationError(ValueError):
    """Некорректный параметр запуска или входных данных."""

    def __init__(self, parameter: str, reason: str) -> None:
        """
        Инициализация исключения.

        Args:
            parameter: Имя параметра (ключ конфигурации, флаг, аргумент)
            reason: Описание проблемы
        """
        self.parameter = parameter
        self.reason = reason
        message = f"Некорректный параметр '{parameter}': {reason}"
        super().__init__(message)


class ContractViolationError(ValueError):
    """Нарушено предусловие чистой операции."""

    def __init__(self, operation: str, condition: str) -> None:
        """
        Инициализация исключения.

        Args:
            operation: Имя операции
            condition: Нарушенное условие
        """
        self.operation = operation
        self.condition = condition
        message = f"Нарушено предусловие {operation}: {condition}"
        super().__init__(message)


class InconsistencyError(ArithmeticError):
    """Два вычисления одной величины расходятся или деление не является точным."""

    def __init__(self, quantity: str, detail: str) -> None:
        """
        Инициализация исключения.

        Args:
            quantity: Обозначение величины, например ``t_10^(7)``
            detail: Расхождение в текстовом виде
        """
        self.quantity = quantity
        self.detail = detail
        message = f"Внутреннее расхождение для {quantity}: {detail}"
        super().__init__(message)


class IdentityFailureError(AssertionError):
    """Не выполнено обязательное тождество самопроверки."""

    def __init__(self, identity: str, detail: str) -> None:
        """
        Инициализация исключения.

        Args:
            identity: Название тождества
            detail: Первая строка, на которой тождество нарушено
        """
        self.identity = identity
        self.detail = detail
        message = f"Тождество '{identity}' не выполнено: {detail}"
        super().__init__(message)
