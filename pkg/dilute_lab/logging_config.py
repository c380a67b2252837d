"""Логирование dilute_lab: файл с ротацией и краткие сообщения в stderr."""

import logging
import sys
from logging.handlers import RotatingFileHandler

from dilute_lab.infra.settings import SettingsLoader

PACKAGE_LOGGER = "dilute_lab"


def _level(name: str, fallback: int) -> int:
    value = getattr(logging, str(name).upper(), None)
    return value if isinstance(value, int) else fallback


def setup_logging(level: str | None = None) -> logging.Logger:
    """
    Настроить логгер пакета ``dilute_lab``.

    Полные записи с именем модуля идут в файл с ротацией (размер и число
    копий берутся из настроек ``log_max_bytes`` и ``log_backup_count``), в
    stderr попадают только сообщения уровня ``console_level`` и выше.
    Повторный вызов заменяет обработчики.

    Args:
        level: Уровень для файла; по умолчанию настройка ``log_level``

    Returns:
        Настроенный логгер пакета
    """
    settings = SettingsLoader()
    log_path = settings.get_path("log_file")
    log_path.parent.mkdir(parents=True, exist_ok=True)
    file_level = _level(level or settings.get("log_level"), logging.INFO)
    console_level = _level(settings.get("console_level"), logging.WARNING)

    logger = logging.getLogger(PACKAGE_LOGGER)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()
    logger.setLevel(min(file_level, console_level))
    logger.propagate = False

    file_handler = RotatingFileHandler(
        log_path,
        maxBytes=settings.get_int("log_max_bytes"),
        backupCount=settings.get_int("log_backup_count"),
        encoding="utf-8",
    )
    file_handler.setLevel(file_level)
    file_handler.setFormatter(
        logging.Formatter(
            fmt="%(levelname)s %(asctime)s %(name)s %(message)s",
            datefmt="%Y-%m-%dT%H:%M:%S",
        )
    )
    logger.addHandler(file_handler)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(console_level)
    console_handler.setFormatter(
        logging.Formatter("dilute-lab %(levelname)s: %(message)s")
    )
    logger.addHandler(console_handler)
    return logger


def get_logger(name: str) -> logging.Logger:
    """
    Получить логгер модуля; имена ``dilute_lab.*`` наследуют обработчики пакета.

    Args:
        name: Имя логгера (обычно __name__ модуля)
    """
    return logging.getLogger(name)
