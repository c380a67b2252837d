"""Тесты настроек и логирования."""

import logging
from logging.handlers import RotatingFileHandler
from pathlib import Path

import pytest

from dilute_lab.core.exceptions import ConfigurationError
from dilute_lab.infra.settings import SettingsLoader, _from_env
from dilute_lab.logging_config import PACKAGE_LOGGER, setup_logging


@pytest.fixture
def fresh_settings(monkeypatch):
    """Отдельный экземпляр настроек; прежний возвращается после теста."""
    monkeypatch.setattr(SettingsLoader, "_instance", None)
    return SettingsLoader


@pytest.fixture
def package_logger():
    logger = logging.getLogger(PACKAGE_LOGGER)
    saved = (list(logger.handlers), logger.level, logger.propagate)
    yield logger
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()
    handlers, level, propagate = saved
    for handler in handlers:
        logger.addHandler(handler)
    logger.setLevel(level)
    logger.propagate = propagate


def test_env_values_are_typed():
    assert _from_env("s_enum_max", "5") == 5
    assert _from_env("log_level", "DEBUG") == "DEBUG"
    with pytest.raises(ConfigurationError) as info:
        _from_env("log_max_bytes", "много")
    assert info.value.parameter == "DILUTE_LAB_LOG_MAX_BYTES"


def test_env_overrides_project_settings(fresh_settings, monkeypatch, tmp_path):
    monkeypatch.setenv("DILUTE_LAB_S_ENUM_MAX", "6")
    monkeypatch.setenv("DILUTE_LAB_OUTPUT_DIR", str(tmp_path))
    monkeypatch.setenv("DILUTE_LAB_LOG_FILE", "custom/run.log")
    settings = fresh_settings()
    assert settings.get_int("s_enum_max") == 6
    assert settings.get_path("output_dir") == tmp_path
    assert settings.get_path("log_file") == settings.project_root / "custom/run.log"


def test_bad_env_value_fails_on_load(fresh_settings, monkeypatch):
    monkeypatch.setenv("DILUTE_LAB_DEFAULT_SEED", "1.5")
    with pytest.raises(ConfigurationError):
        fresh_settings()


def test_typed_getters(monkeypatch):
    settings = SettingsLoader()
    assert settings.get_int("log_backup_count") >= 0
    assert settings.get("missing", "x") == "x"
    monkeypatch.setitem(settings._config, "n_dense_max", "4000")
    with pytest.raises(ConfigurationError):
        settings.get_int("n_dense_max")
    monkeypatch.setitem(settings._config, "n_dense_max", True)
    with pytest.raises(ConfigurationError):
        settings.get_int("n_dense_max")
    with pytest.raises(ConfigurationError):
        settings.get_path("log_level")
    assert Path(settings.get_path("output_dir")).is_absolute()


def test_setup_logging_handlers(monkeypatch, tmp_path, package_logger):
    settings = SettingsLoader()
    log_path = tmp_path / "logs" / "lab.log"
    monkeypatch.setitem(settings._config, "log_file", str(log_path))
    monkeypatch.setitem(settings._config, "log_max_bytes", 1024)
    monkeypatch.setitem(settings._config, "log_backup_count", 2)
    monkeypatch.setitem(settings._config, "console_level", "ERROR")

    logger = setup_logging("DEBUG")
    assert logger is package_logger
    assert not logger.propagate
    assert logger.level == logging.DEBUG
    file_handler, console_handler = logger.handlers
    assert isinstance(file_handler, RotatingFileHandler)
    assert (file_handler.maxBytes, file_handler.backupCount) == (1024, 2)
    assert file_handler.level == logging.DEBUG
    assert console_handler.level == logging.ERROR

    logging.getLogger("dilute_lab.core.walks").debug("перечисление s=%d", 3)
    file_handler.flush()
    text = log_path.read_text(encoding="utf-8")
    assert "DEBUG" in text and "dilute_lab.core.walks" in text

    assert len(setup_logging().handlers) == 2
