"""Настройки dilute_lab (Singleton).

Порядок перекрытия: значения по умолчанию, секция ``[tool.dilute_lab]``
в pyproject.toml, config.json в корне проекта, переменные окружения
``DILUTE_LAB_<КЛЮЧ>``.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any

try:
    import tomllib  # Python 3.11+
except ImportError:
    import tomli as tomllib  # Для Python < 3.11

from dilute_lab.core.exceptions import ConfigurationError

ENV_PREFIX = "DILUTE_LAB_"

_DEFAULTS: dict[str, Any] = {
    "log_file": "logs/dilute_lab.log",
    "log_level": "INFO",
    "console_level": "WARNING",
    "log_max_bytes": 5 * 1024 * 1024,
    "log_backup_count": 3,
    "output_dir": "output",
    "s_enum_max": 7,
    "n_dense_max": 4000,
    "default_seed": 20240601,
    "default_threads": 0,
}

# Относительные пути считаются от корня проекта
_PATH_KEYS = ("log_file", "output_dir")


def _from_env(key: str, raw: str) -> Any:
    if isinstance(_DEFAULTS[key], int):
        try:
            return int(raw)
        except ValueError as e:
            raise ConfigurationError(
                ENV_PREFIX + key.upper(), f"ожидалось целое число, получено {raw!r}"
            ) from e
    return raw


class SettingsLoader:
    """Настройки проекта (Singleton).

    Неизвестные ключи в ``[tool.dilute_lab]`` и config.json сохраняются,
    но типизированные методы читают только известные.
    """

    _instance: SettingsLoader | None = None
    _config: dict[str, Any] = {}

    def __new__(cls) -> SettingsLoader:
        if cls._instance is None:
            cls._instance = super().__new__(cls)
            cls._instance._config = {}
            cls._instance._load_config()
        return cls._instance

    @property
    def project_root(self) -> Path:
        """Корень проекта (каталог с pyproject.toml)."""
        return Path(__file__).parent.parent.parent

    def _load_config(self) -> None:
        root = self.project_root
        config: dict[str, Any] = dict(_DEFAULTS)

        pyproject_path = root / "pyproject.toml"
        if pyproject_path.exists():
            try:
                with open(pyproject_path, "rb") as f:
                    config.update(tomllib.load(f).get("tool", {}).get("dilute_lab", {}))
            except (OSError, tomllib.TOMLDecodeError):
                pass

        config_json_path = root / "config.json"
        if config_json_path.exists():
            try:
                with open(config_json_path, encoding="utf-8") as f:
                    config.update(json.load(f))
            except (OSError, json.JSONDecodeError):
                pass

        for key in _DEFAULTS:
            raw = os.environ.get(ENV_PREFIX + key.upper())
            if raw is not None:
                config[key] = _from_env(key, raw)

        for key in _PATH_KEYS:
            path = Path(config[key])
            config[key] = str(path if path.is_absolute() else root / path)
        self._config = config

    def get(self, key: str, default: Any = None) -> Any:
        """
        Получить значение настройки по ключу.

        Args:
            key: Ключ настройки
            default: Значение, если ключ не задан

        Returns:
            Значение настройки или default
        """
        return self._config.get(key, default)

    def get_int(self, key: str) -> int:
        """
        Целочисленная настройка.

        Raises:
            ConfigurationError: Если значение не целое
        """
        value = self._config.get(key, _DEFAULTS.get(key))
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigurationError(key, f"ожидалось целое число, получено {value!r}")
        return value

    def get_path(self, key: str) -> Path:
        """Путь из настроек, уже приведённый к абсолютному."""
        if key not in _PATH_KEYS:
            raise ConfigurationError(key, "настройка не является путём")
        return Path(self._config[key])
