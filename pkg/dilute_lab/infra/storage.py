"""Запись таблиц результатов в CSV/JSON (в файл атомарно или в stdout)."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from collections.abc import Iterable, Mapping, Sequence
from fractions import Fraction
from pathlib import Path
from typing import Any

from dilute_lab.core.exceptions import ConfigurationError
from dilute_lab.core.utils import format_fraction
from dilute_lab.infra.settings import SettingsLoader
from dilute_lab.logging_config import get_logger

_logger = get_logger(__name__)

FORMATS = ("csv", "json")


def serialize_value(value: Any) -> Any:
    """
    Привести значение к виду для JSON.

    Рациональные числа записываются как ``num/den``, бесконечности и NaN
    как строки, перечисления как их значения.
    """
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, Fraction):
        return format_fraction(value)
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        return value if math.isfinite(value) else str(value)
    if isinstance(value, (list, tuple)):
        return [serialize_value(v) for v in value]
    if hasattr(value, "value") and isinstance(value.value, str):
        return value.value
    return str(value)


def _csv_cell(value: Any) -> str:
    value = serialize_value(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        return ";".join(str(v) for v in value)
    return str(value)


class ReportWriter:
    """Писатель таблиц результатов."""

    def __init__(
        self, output_format: str = "csv", output_path: str | None = None
    ) -> None:
        """
        Инициализация писателя.

        Args:
            output_format: csv или json
            output_path: Путь к файлу; None или "-" означает stdout.
                Относительные пути отсчитываются от output_dir из настроек.

        Raises:
            ConfigurationError: Если формат неизвестен
        """
        if output_format not in FORMATS:
            raise ConfigurationError(
                "format", f"ожидалось одно из {FORMATS}, получено {output_format!r}"
            )
        self.output_format = output_format
        self.output_path = self._resolve(output_path)

    @staticmethod
    def _resolve(output_path: str | None) -> Path | None:
        if output_path in (None, "", "-"):
            return None
        path = Path(output_path)
        if not path.is_absolute():
            path = SettingsLoader().get_path("output_dir") / path
        return path

    def render_table(
        self, columns: Sequence[str], rows: Iterable[Mapping[str, Any]]
    ) -> str:
        """Сформировать текст таблицы в выбранном формате."""
        if self.output_format == "json":
            objects = [
                {column: serialize_value(row.get(column)) for column in columns}
                for row in rows
            ]
            return json.dumps(objects, indent=2, ensure_ascii=False) + "\n"
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_csv_cell(row.get(column)) for column in columns])
        return buffer.getvalue()

    def write_table(
        self, columns: Sequence[str], rows: Iterable[Mapping[str, Any]]
    ) -> None:
        """Записать таблицу: в stdout или в файл через временный файл."""
        self._emit(self.render_table(columns, rows))

    def write_lines(self, lines: Iterable[str]) -> None:
        """Записать построчный текст (дампы путей, значения λ_max)."""
        self._emit("".join(f"{line}\n" for line in lines))

    def _emit(self, text: str) -> None:
        if self.output_path is None:
            sys.stdout.write(text)
            return
        self._save_atomic(self.output_path, text)
        _logger.info("Результаты записаны в %s", self.output_path)

    @staticmethod
    def _save_atomic(path: Path, text: str) -> None:
        """
        Сохранить файл атомарно (через временный файл).

        Args:
            path: Итоговый путь
            text: Содержимое
        """
        temp_file = path.with_suffix(path.suffix + ".tmp")
        path.parent.mkdir(parents=True, exist_ok=True)
        try:
            with open(temp_file, "w", encoding="utf-8", newline="") as f:
                f.write(text)
            temp_file.replace(path)
        except Exception:
            if temp_file.exists():
                temp_file.unlink()
            raise
