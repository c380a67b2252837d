"""Команды CLI интерфейса."""

from __future__ import annotations

import argparse
import os
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from prettytable import PrettyTable

from dilute_lab.core import walks
from dilute_lab.core.exceptions import (
    ConfigurationError,
    ContractViolationError,
    IdentityFailureError,
    InconsistencyError,
)
from dilute_lab.core.models import CheckKind, CheckReport, MomentParams, ReportRow
from dilute_lab.core.series import SeriesParams
from dilute_lab.core.usecases import (
    COUNT_TABLES,
    bounds_reports,
    classify_table,
    compare_table,
    counts_check,
    counts_table,
    enumerate_dump,
    exact_table,
    mc_table,
    run_selfcheck,
    series_table,
    spectral_table,
)
from dilute_lab.core.utils import (
    format_fraction,
    parse_fraction,
    parse_fraction_list,
    validate_int,
)
from dilute_lab.infra.settings import SettingsLoader
from dilute_lab.infra.storage import FORMATS, ReportWriter
from dilute_lab.logging_config import get_logger
from dilute_lab.montecarlo.config import EnsembleConfig
from dilute_lab.montecarlo.distributions import DISTRIBUTIONS, get_distribution

try:
    import tomllib  # Python 3.11+
except ModuleNotFoundError:
    import tomli as tomllib  # Для Python < 3.11

_logger = get_logger(__name__)

SERIES_JSON_KEYS = ("s", "poly")
COUNTS_COLUMNS = ("name", "s", "d_or_m", "value")
EXACT_COLUMNS = ("quantity", "s", "n", "rho", "value", "provenance")
CLASSIFY_COLUMNS = ("quantity", "s", "walk", "value", "provenance")
MC_COLUMNS = (
    "s",
    "mc_mean",
    "mc_stderr",
    "exact",
    "series",
    "n",
    "rho",
    "V4",
    "samples",
    "seed",
)
COMPARE_COLUMNS = (*MC_COLUMNS, "catalan", "mc_ratio", "exact_ratio")
SPECTRAL_COLUMNS = (
    "eps",
    "frequency",
    "stirling_bound",
    "stirling_s",
    "stirling_vacuous",
    "chebyshev_bound",
    "chebyshev_s",
    "chebyshev_vacuous",
    "n",
    "rho",
    "samples",
    "seed",
)
CHECK_COLUMNS = ("identity", "kind", "index", "observed", "expected", "status")

# Начиная с этого s перечисление по умолчанию делится между процессами
_PARALLEL_ENUM_S = 6


@dataclass(frozen=True)
class Option:
    """Параметр команды: общий для флага и ключа файла конфигурации."""

    name: str
    kind: str
    default: Any = None
    help: str = ""
    required: bool = False
    choices: tuple[str, ...] | None = None

    @property
    def flag(self) -> str:
        return "--" + self.name.replace("_", "-")


COMMON_OPTIONS = (
    Option("output", "str", None, "Файл результата (- или пусто: stdout)"),
    Option("format", "str", "csv", "Формат результата", choices=FORMATS),
    Option("threads", "int", None, "Число потоков или процессов (0 = авто)"),
)

_S_ENUM_MAX_OPTION = Option(
    "s_enum_max", "int", None, "Предел перечисления путей (по умолчанию из настроек)"
)

_ENSEMBLE_OPTIONS = (
    Option("n", "int", help="Размер матрицы", required=True),
    Option("rho", "float", help="Параметр разреживания ρ", required=True),
    Option("dist", "str", "rademacher", "Закон элементов", choices=DISTRIBUTIONS),
    Option("q", "rational", None, "Параметр q двухточечного закона"),
    Option("samples", "int", 1000, "Число матриц"),
    Option("seed", "int", None, "Главное зерно (по умолчанию из настроек)"),
    Option("s_max", "int", 3, "Наибольшее s для Tr H^{2s}"),
    _S_ENUM_MAX_OPTION,
)

COMMAND_OPTIONS: dict[str, tuple[Option, ...]] = {
    "series": (
        Option("order", "int", 8, "Порядок ряда по z"),
        Option("u", "rational", None, "Числовое значение u (по умолчанию символьно)"),
    ),
    "counts": (
        Option(
            "name", "str", "all", "Последовательность", choices=("all", *COUNT_TABLES)
        ),
        Option("s_max", "int", 12, "Наибольший индекс таблицы"),
        Option("check", "bool", False, "Проверить тождества вместо таблицы"),
        Option("limit", "int", 200, "Граница индексов в режиме --check"),
    ),
    "enumerate": (
        Option("s", "int", 3, "Полудлина пути"),
        Option(
            "filter", "str", "even", "Фильтр путей", choices=tuple(walks.WALK_FILTERS)
        ),
        Option("walk", "str", None, "Классифицировать один путь вида 1,2,1"),
        _S_ENUM_MAX_OPTION,
    ),
    "exact": (
        Option("n", "int", help="Размер матрицы", required=True),
        Option("rho", "rational", help="Параметр разреживания ρ", required=True),
        Option("s", "int", help="Порядок момента M_{2s}", required=True),
        Option("moments", "str", "1", "Моменты V2,V4,... через запятую"),
        Option("decompose", "bool", False, "Разложить на древесную и остальную части"),
        Option("rose", "bool", False, "Добавить суммы по «розам» P(m)"),
        _S_ENUM_MAX_OPTION,
    ),
    "mc": (
        *_ENSEMBLE_OPTIONS,
        Option("spectral", "bool", False, "Исследовать спектральную норму"),
        Option("eps", "str", "0.05,0.1,0.2", "Значения ε через запятую"),
        Option("chi", "rational", None, "χ для оценки со Стирлингом"),
        Option("lambda_dump", "str", None, "Файл для значений λ_max"),
    ),
    "compare": _ENSEMBLE_OPTIONS,
    "bounds": (
        Option("order", "int", 48, "Наибольшее s"),
        Option("u_grid", "str", "1/100,1/10,1/2,1", "Сетка значений u"),
    ),
    "selfcheck": (
        Option("depth", "str", "quick", "Глубина проверки", choices=("quick", "full")),
    ),
}

COMMAND_HELP = {
    "series": "Коэффициенты производящей функции моментов",
    "counts": "Таблицы чисел Каталана и родственных последовательностей",
    "enumerate": "Перечислить или классифицировать чётные пути",
    "exact": "Точный момент при конечных n и ρ",
    "mc": "Моделирование Монте-Карло",
    "compare": "Сравнение выборки, точного движка и ряда",
    "bounds": "Верхняя и нижняя оценки коэффициентов",
    "selfcheck": "Набор самопроверки",
}


@dataclass
class RunConfig:
    """Полностью разрешённая конфигурация запуска."""

    command: str
    params: dict[str, Any]
    output_format: str = "csv"
    output_path: str | None = None
    threads: int = 0
    config_file: str | None = None
    moment_params: MomentParams | None = field(default=None, repr=False)
    ensemble: EnsembleConfig | None = field(default=None, repr=False)


class StrictArgumentParser(argparse.ArgumentParser):
    """Парсер, который сообщает об ошибке исключением, а не выходом."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise ConfigurationError("arguments", message)


def _add_option(parser: argparse.ArgumentParser, option: Option) -> None:
    if option.kind == "bool":
        parser.add_argument(
            option.flag, dest=option.name, action="store_true", default=None,
            help=option.help,
        )
        return
    converter = {"int": int, "float": float}.get(option.kind, str)
    parser.add_argument(
        option.flag,
        dest=option.name,
        type=converter,
        default=None,
        choices=option.choices,
        help=option.help,
    )


def create_parser() -> argparse.ArgumentParser:
    """
    Создать парсер аргументов командной строки.

    Returns:
        Настроенный ArgumentParser
    """
    parser = StrictArgumentParser(
        prog="dilute-lab",
        description="Моменты разреженных случайных матриц: ряды, пути, выборки",
    )
    subparsers = parser.add_subparsers(
        dest="command",
        help="Доступные команды",
        metavar="COMMAND",
    )
    for command, options in COMMAND_OPTIONS.items():
        command_parser = subparsers.add_parser(command, help=COMMAND_HELP[command])
        for option in (*options, *COMMON_OPTIONS):
            _add_option(command_parser, option)
        command_parser.add_argument(
            "--config", dest="config", default=None, help="Файл конфигурации TOML"
        )
    return parser


def _coerce(option: Option, value: Any, source: str) -> Any:
    expected = {
        "int": lambda v: isinstance(v, int) and not isinstance(v, bool),
        "float": lambda v: isinstance(v, (int, float)) and not isinstance(v, bool),
        "str": lambda v: isinstance(v, str),
        "bool": lambda v: isinstance(v, bool),
        "rational": lambda v: (
            isinstance(v, (int, float, str)) and not isinstance(v, bool)
        ),
    }[option.kind]
    if not expected(value):
        raise ConfigurationError(
            f"{source}.{option.name}",
            f"ожидался тип {option.kind}, получено {value!r}",
        )
    if option.kind == "float":
        return float(value)
    if option.kind == "rational" and not isinstance(value, str):
        return str(value)
    return value


def load_config_file(path: str) -> dict[str, dict[str, Any]]:
    """
    Прочитать файл конфигурации TOML с секциями [common] и по командам.

    Raises:
        ConfigurationError: Если файл не читается, секция или ключ неизвестны,
            или тип значения не совпадает
    """
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except OSError as e:
        raise ConfigurationError("config", f"не удалось прочитать {path}: {e}") from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigurationError("config", f"ошибка разбора {path}: {e}") from e

    sections: dict[str, dict[str, Any]] = {}
    for section, values in data.items():
        if section == "common":
            options = COMMON_OPTIONS
        elif section in COMMAND_OPTIONS:
            options = COMMAND_OPTIONS[section]
        else:
            raise ConfigurationError("config", f"неизвестная секция [{section}]")
        if not isinstance(values, dict):
            raise ConfigurationError("config", f"ключ {section!r} вне секции")
        known = {option.name: option for option in options}
        resolved = {}
        for key, value in values.items():
            if key not in known:
                raise ConfigurationError(f"{section}.{key}", "неизвестный ключ")
            resolved[key] = _coerce(known[key], value, section)
        sections[section] = resolved
    return sections


def parse_config(argv: Sequence[str] | None = None) -> RunConfig:
    """
    Разобрать аргументы и файл конфигурации в RunConfig.

    Флаги командной строки перекрывают ключи файла, файл перекрывает
    значения по умолчанию. Все параметры проверяются до начала вычислений,
    итоговая конфигурация пишется в лог.

    Raises:
        ConfigurationError: При неизвестном флаге или ключе, несовпадении
            типа или нарушении ограничения
    """
    args = create_parser().parse_args(argv)
    if not args.command:
        raise ConfigurationError("command", "не указана команда")
    options = (*COMMAND_OPTIONS[args.command], *COMMON_OPTIONS)
    params = {option.name: option.default for option in options}

    if args.config:
        sections = load_config_file(args.config)
        params.update(sections.get("common", {}))
        params.update(sections.get(args.command, {}))
    for option in options:
        value = getattr(args, option.name)
        if value is not None:
            params[option.name] = value

    for option in options:
        if option.required and params[option.name] is None:
            raise ConfigurationError(
                option.name, f"обязательный параметр {option.flag}"
            )
        if option.choices and params[option.name] not in option.choices:
            raise ConfigurationError(
                option.name,
                f"ожидалось одно из {option.choices}, получено {params[option.name]!r}",
            )

    settings = SettingsLoader()
    threads = params.pop("threads")
    threads = settings.get_int("default_threads") if threads is None else threads
    run = RunConfig(
        command=args.command,
        params=params,
        output_format=params.pop("format"),
        output_path=params.pop("output"),
        threads=validate_int("threads", threads, minimum=0),
        config_file=args.config,
    )
    _validate(run)
    _logger.info(
        "RunConfig: command=%s params=%s format=%s output=%s threads=%d config=%s",
        run.command,
        run.params,
        run.output_format,
        run.output_path or "-",
        run.threads,
        run.config_file or "-",
    )
    return run


def _ensemble(run: RunConfig) -> EnsembleConfig:
    p = run.params
    seed = p["seed"]
    if seed is None:
        seed = SettingsLoader().get_int("default_seed")
    return EnsembleConfig(
        n=p["n"],
        rho=p["rho"],
        distribution=get_distribution(p["dist"], p["q"]),
        master_seed=seed,
        samples=p["samples"],
        threads=run.threads,
    )


def _enum_limit(p: dict[str, Any]) -> int:
    if p["s_enum_max"] is not None:
        validate_int("s_enum_max", p["s_enum_max"], minimum=1)
    return walks.enum_limit(p["s_enum_max"])


def _validate(run: RunConfig) -> None:
    p = run.params
    command = run.command
    if command == "series":
        u = None if p["u"] is None else parse_fraction(p["u"], "u")
        SeriesParams(p["order"], u)
    elif command == "counts":
        validate_int("s_max", p["s_max"], minimum=0)
        validate_int("limit", p["limit"], minimum=2)
    elif command == "enumerate":
        if p["walk"] is not None:
            walks.CanonicalWalk.parse(p["walk"])
        else:
            limit = _enum_limit(p)
            validate_int("s", p["s"], minimum=1, maximum=limit)
    elif command == "exact":
        run.moment_params = MomentParams(
            p["n"], p["rho"], parse_fraction_list(p["moments"], "moments")
        )
        s = validate_int("s", p["s"], minimum=0, maximum=_enum_limit(p))
        given = len(run.moment_params.moments)
        if given < s:
            raise ConfigurationError(
                "moments", f"для s={s} нужны V2..V{2 * s}, задано моментов: {given}"
            )
    elif command in ("mc", "compare"):
        run.ensemble = _ensemble(run)
        validate_int("s_max", p["s_max"], minimum=1)
        _enum_limit(p)
        if command == "mc":
            _validate_spectral(p)
    elif command == "bounds":
        SeriesParams(p["order"])
        if any(u < 0 for u in parse_fraction_list(p["u_grid"], "u_grid")):
            raise ConfigurationError("u_grid", "значения сетки должны быть >= 0")


def _validate_spectral(p: dict[str, Any]) -> None:
    if p["lambda_dump"] is not None and not p["spectral"]:
        raise ConfigurationError(
            "lambda_dump", "используется только вместе с --spectral"
        )
    if any(eps <= 0 for eps in parse_fraction_list(p["eps"], "eps")):
        raise ConfigurationError("eps", "значения eps должны быть > 0")
    if p["chi"] is not None and parse_fraction(p["chi"], "chi") <= 0:
        raise ConfigurationError("chi", "должно быть > 0")


def _writer(run: RunConfig, path: str | None = None) -> ReportWriter:
    return ReportWriter(run.output_format, run.output_path if path is None else path)


def _exact_text(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else format_fraction(value)


def _row_dict(row: ReportRow) -> dict[str, Any]:
    return {
        "quantity": row.quantity,
        **row.indices,
        "value": row.value,
        "provenance": row.provenance,
    }


def _check_rows(reports: Sequence[CheckReport]) -> list[dict[str, Any]]:
    return [
        {
            "identity": row.identity,
            "kind": report.kind.value,
            "index": row.index,
            "observed": row.observed,
            "expected": row.expected,
            "status": row.status,
        }
        for report in reports
        for row in report.rows
    ]


def _hard_failed(reports: Sequence[CheckReport]) -> list[CheckReport]:
    return [r for r in reports if r.kind is CheckKind.HARD and not r.passed]


def _report_failure(reports: Sequence[CheckReport]) -> int:
    failed = _hard_failed(reports)
    if not failed:
        return 0
    row = failed[0].failures[0]
    print(
        f"Ошибка: тождество '{failed[0].name}' не выполнено: {row.index}: "
        f"получено {row.observed}, ожидалось {row.expected}",
        file=sys.stderr,
    )
    return 1


def _profile_workers(run: RunConfig, s: int) -> int:
    if run.threads:
        return run.threads
    return (os.cpu_count() or 1) if s >= _PARALLEL_ENUM_S else 1


def cmd_series(run: RunConfig) -> int:
    """
    Обработка команды series.

    Args:
        run: Конфигурация запуска

    Returns:
        Код возврата (0 - успех)
    """
    u = run.params["u"]
    u_value = None if u is None else parse_fraction(u, "u")
    rows = series_table(run.params["order"], u_value)
    writer = _writer(run)
    if run.output_format == "json":
        writer.write_table(
            SERIES_JSON_KEYS,
            [
                {
                    "s": row.indices["s"],
                    "poly": [format_fraction(c) for c in row.value.coeffs],
                }
                for row in rows
            ],
        )
        return 0
    width = max(len(row.value.coeffs) for row in rows)
    columns = ["s", *(f"coeff_u{p}" for p in range(width))]
    table = []
    for row in rows:
        record: dict[str, Any] = {"s": row.indices["s"]}
        for p in range(width):
            record[f"coeff_u{p}"] = _exact_text(row.value[p])
        table.append(record)
    writer.write_table(columns, table)
    return 0


def cmd_counts(run: RunConfig) -> int:
    """Обработка команды counts: таблица или проверка тождеств (--check)."""
    p = run.params
    if p["check"]:
        reports = counts_check(p["limit"])
        _writer(run).write_table(CHECK_COLUMNS, _check_rows(reports))
        return _report_failure(reports)
    rows = counts_table(p["name"], p["s_max"])
    _writer(run).write_table(
        COUNTS_COLUMNS,
        [
            {"name": row.quantity, **row.indices, "value": row.value}
            for row in rows
        ],
    )
    return 0


def cmd_enumerate(run: RunConfig) -> int:
    """Обработка команды enumerate."""
    p = run.params
    if p["walk"] is not None:
        rows = classify_table(p["walk"])
        _writer(run).write_table(CLASSIFY_COLUMNS, [_row_dict(row) for row in rows])
        return 0
    _writer(run).write_lines(enumerate_dump(p["s"], p["filter"], p["s_enum_max"]))
    return 0


def cmd_exact(run: RunConfig) -> int:
    """Обработка команды exact."""
    p = run.params
    rows = exact_table(
        run.moment_params,
        p["s"],
        decompose=p["decompose"],
        rose=p["rose"],
        workers=_profile_workers(run, p["s"]),
        s_enum_max=p["s_enum_max"],
    )
    _writer(run).write_table(EXACT_COLUMNS, [_row_dict(row) for row in rows])
    return 0


def cmd_mc(run: RunConfig) -> int:
    """
    Обработка команды mc.

    С ``--spectral`` вместо таблицы моментов пишется таблица превышений
    порогов 2(1+ε); попадание медианы λ_max в контрольную полосу
    сообщается в stderr как диагностика и на код выхода не влияет.
    """
    p = run.params
    config = run.ensemble
    if not p["spectral"]:
        rows = mc_table(config, p["s_max"], p["s_enum_max"])
        _writer(run).write_table(MC_COLUMNS, rows)
        return 0

    eps_list = [float(eps) for eps in parse_fraction_list(p["eps"], "eps")]
    chi = None if p["chi"] is None else parse_fraction(p["chi"], "chi")
    summary = spectral_table(config, eps_list, chi)
    rows = [
        {
            "eps": bound.eps,
            "frequency": bound.frequency,
            "stirling_bound": bound.stirling_bound,
            "stirling_s": bound.stirling_s,
            "stirling_vacuous": bound.stirling_vacuous,
            "chebyshev_bound": bound.chebyshev_bound,
            "chebyshev_s": bound.chebyshev_s,
            "chebyshev_vacuous": bound.chebyshev_vacuous,
            "n": config.n,
            "rho": config.rho,
            "samples": len(summary.lambda_max),
            "seed": config.master_seed,
        }
        for bound in summary.bounds
    ]
    _writer(run).write_table(SPECTRAL_COLUMNS, rows)
    status = "PASS" if summary.in_sanity_band else "FAIL"
    print(
        f"diagnostic: median lambda_max={summary.median:.4f} band [1.9, 2.4] {status}",
        file=sys.stderr,
    )
    if p["lambda_dump"] is not None:
        ReportWriter("csv", p["lambda_dump"]).write_lines(
            repr(value) for value in summary.lambda_max
        )
    return 0


def cmd_compare(run: RunConfig) -> int:
    """Обработка команды compare."""
    rows = compare_table(
        run.ensemble, run.params["s_max"], run.params["s_enum_max"]
    )
    _writer(run).write_table(COMPARE_COLUMNS, rows)
    return 0


def cmd_bounds(run: RunConfig) -> int:
    """Обработка команды bounds."""
    p = run.params
    reports = bounds_reports(p["order"], parse_fraction_list(p["u_grid"], "u_grid"))
    _writer(run).write_table(CHECK_COLUMNS, _check_rows(reports))
    return _report_failure(reports)


def _status(report: CheckReport) -> str:
    if report.failures:
        return "FAIL"
    return "UNDETERMINED" if report.undetermined else "PASS"


def render_matrix(reports: Sequence[CheckReport]) -> str:
    """Таблица PASS/FAIL по тождествам."""
    table = PrettyTable(["identity", "kind", "rows", "failed", "status"])
    table.align["identity"] = "l"
    for report in reports:
        table.add_row(
            [
                report.name,
                report.kind.value,
                len(report.rows),
                len(report.failures),
                _status(report),
            ]
        )
    return table.get_string()


def cmd_selfcheck(run: RunConfig) -> int:
    """
    Обработка команды selfcheck.

    Печатает матрицу PASS/FAIL и заметки диагностик. Код 1 при первом
    проваленном обязательном тождестве.
    """
    result = run_selfcheck(run.params["depth"])
    print(render_matrix(result.reports))
    for report in result.reports:
        for note in report.notes:
            print(f"{report.name}: {note}")
    if run.output_path:
        _writer(run).write_table(CHECK_COLUMNS, _check_rows(result.reports))
    try:
        result.raise_for_failure()
    except IdentityFailureError as e:
        print(f"Ошибка: {e}", file=sys.stderr)
        return 1
    return 0


HANDLERS: dict[str, Callable[[RunConfig], int]] = {
    "series": cmd_series,
    "counts": cmd_counts,
    "enumerate": cmd_enumerate,
    "exact": cmd_exact,
    "mc": cmd_mc,
    "compare": cmd_compare,
    "bounds": cmd_bounds,
    "selfcheck": cmd_selfcheck,
}


def main(argv: Sequence[str] | None = None) -> int:
    """
    Главная функция CLI.

    Returns:
        Код возврата (0 - успех, 1 - нарушено тождество, 2 - ошибка конфигурации)
    """
    try:
        run = parse_config(argv)
        return HANDLERS[run.command](run)
    except (ConfigurationError, ContractViolationError) as e:
        print(f"Ошибка: {e}", file=sys.stderr)
        return 2
    except (InconsistencyError, IdentityFailureError) as e:
        print(f"Ошибка: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"Ошибка записи: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
