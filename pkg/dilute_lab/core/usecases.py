"""Сценарии команд: таблицы результатов и набор самопроверки."""

from __future__ import annotations

import math
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from dilute_lab.core import combinatorics, series, walks
from dilute_lab.core.exceptions import ConfigurationError, IdentityFailureError
from dilute_lab.core.models import (
    CheckKind,
    CheckReport,
    MomentParams,
    Provenance,
    ReportRow,
)
from dilute_lab.core.series import SeriesParams
from dilute_lab.core.utils import Rational
from dilute_lab.decorators import log_operation
from dilute_lab.logging_config import get_logger
from dilute_lab.montecarlo.config import EnsembleConfig
from dilute_lab.montecarlo.estimator import (
    SpectralSummary,
    compare_asymptotic,
    estimate_moments,
    spectral_norm_study,
)

_logger = get_logger(__name__)

COUNT_TABLES = (
    "catalan",
    "root_degree",
    "convolution",
    "r",
    "n_one_multiedge",
    "n12",
    "de",
    "n_hat_22",
    "phi_12",
    "phi_22",
)

DEFAULT_U_GRID = (Fraction(1, 100), Fraction(1, 10), Fraction(1, 2), Fraction(1))


def sqrt_rho(n: int) -> Fraction:
    """Рациональное приближение √n для сеток с ρ = √n."""
    return Fraction(math.sqrt(n)).limit_denominator(1000)


# Таблицы команд


@log_operation("SERIES")
def series_table(order: int, u_value: Rational | None = None) -> list[ReportRow]:
    """Коэффициенты m̂_s для s = 0..order (символьно по u или при заданном u)."""
    params = SeriesParams(order, None if u_value is None else Fraction(u_value))
    solved = series.solve_moment_series(params)
    return [
        ReportRow("m_s", {"s": s}, poly, Provenance.SERIES)
        for s, poly in enumerate(solved.coeffs)
    ]


def _count_rows(name: str, s_max: int) -> list[ReportRow]:
    closed = Provenance.CLOSED_FORM
    rows: list[ReportRow] = []
    if name == "catalan":
        rows = [
            ReportRow(name, {"s": s, "d_or_m": ""}, combinatorics.catalan(s), closed)
            for s in range(s_max + 1)
        ]
    elif name == "root_degree":
        rows = [
            ReportRow(
                name,
                {"s": s, "d_or_m": d},
                combinatorics.catalan_root_degree(s, d),
                closed,
            )
            for s in range(1, s_max + 1)
            for d in range(1, s + 1)
        ]
    elif name == "convolution":
        rows = [
            ReportRow(
                name,
                {"s": k, "d_or_m": p},
                combinatorics.catalan_convolution(k, p),
                closed,
            )
            for k in range(s_max + 1)
            for p in range(1, 4)
        ]
    elif name == "r":
        rows = [
            ReportRow(name, {"s": s, "d_or_m": ""}, combinatorics.r_sequence(s), closed)
            for s in range(2, s_max + 1)
        ]
    elif name == "n_one_multiedge":
        rows = [
            ReportRow(
                name, {"s": s, "d_or_m": m}, combinatorics.n_one_multiedge(s, m), closed
            )
            for s in range(1, s_max + 1)
            for m in range(1, s + 1)
        ]
    elif name == "n12":
        rows = [
            ReportRow(name, {"s": s, "d_or_m": 2}, combinatorics.n_12_closed(s), closed)
            for s in range(2, s_max + 1)
        ]
    elif name == "de":
        for k in range(1, s_max + 1):
            for m in range(1, k + 1):
                d_value, e_value = combinatorics.de_recurrence(k, m)
                rows.append(ReportRow("D", {"s": k, "d_or_m": m}, d_value, closed))
                rows.append(ReportRow("E", {"s": k, "d_or_m": m}, e_value, closed))
    elif name == "n_hat_22":
        rows = [
            ReportRow(name, {"s": s, "d_or_m": 2}, combinatorics.n_hat_22(s), closed)
            for s in range(4, s_max + 1)
        ]
    elif name == "phi_12" and s_max >= 2:
        phi = series.phi_12(s_max)
        rows = [
            ReportRow(name, {"s": s, "d_or_m": 2}, int(phi[s][0]), Provenance.SERIES)
            for s in range(2, s_max + 1)
        ]
    elif name == "phi_22" and s_max >= 4:
        phi = series.phi_22(s_max)
        rows = [
            ReportRow(name, {"s": s, "d_or_m": 2}, int(phi[s][0]), Provenance.SERIES)
            for s in range(4, s_max + 1)
        ]
    return rows


@log_operation("COUNTS", verbose=True)
def counts_table(name: str, s_max: int) -> list[ReportRow]:
    """Таблица последовательности ``name`` (или всех при ``all``) до s_max."""
    names = COUNT_TABLES if name == "all" else (name,)
    rows: list[ReportRow] = []
    for table in names:
        rows.extend(_count_rows(table, s_max))
    return rows


@log_operation("COUNTS_CHECK")
def counts_check(limit: int) -> list[CheckReport]:
    """Тождества комбинаторики до ``limit`` и оценка свёрток."""
    reports = combinatorics.check_identities(limit)
    reports.append(combinatorics.check_convolution_bound(min(limit, 100), 10))
    return reports


@log_operation("ENUMERATE")
def enumerate_dump(
    s: int, filter_name: str = "even", s_enum_max: int | None = None
) -> list[str]:
    """Дамп путей: заголовок ``# s=<s> filter=<name>`` и по пути на строку."""
    if filter_name not in walks.WALK_FILTERS:
        raise ConfigurationError(
            "filter", f"ожидалось одно из {sorted(walks.WALK_FILTERS)}: {filter_name!r}"
        )
    lines = [f"# s={s} filter={filter_name}"]
    lines.extend(
        str(walk)
        for walk in walks.enumerate_walks(
            s, walks.WALK_FILTERS[filter_name], s_enum_max
        )
    )
    return lines


@log_operation("CLASSIFY")
def classify_table(walk_text: str) -> list[ReportRow]:
    """Классификация одного пути в виде строк отчёта."""
    walk = walks.CanonicalWalk.parse(walk_text)
    info = walks.classify(walk)
    provenance = Provenance.ENUMERATION
    indices = {"s": walk.s, "walk": str(walk)}
    values: dict[str, Any] = {
        "is_even": info.is_even,
        "is_tree_type": info.is_tree_type,
        "four_edge_count": info.four_edge_count,
        "four_edges_disjoint": info.four_edges_disjoint,
        "max_exit_degree": info.max_exit_degree,
        "dyck": "".join("+" if step > 0 else "-" for step in info.dyck),
        "edge_multiplicities": " ".join(
            f"{a}-{b}:{count}"
            for (a, b), count in sorted(info.edge_multiplicities.items())
        ),
        "kappa": " ".join(f"{v}:{k}" for v, k in sorted(info.kappa.items())),
        "colors": " ".join(
            f"{v}:{color.value}" for v, color in sorted(info.colors.items())
        ),
    }
    return [ReportRow(key, indices, value, provenance) for key, value in values.items()]


@log_operation("EXACT", verbose=True)
def exact_table(
    params: MomentParams,
    s: int,
    decompose: bool = False,
    rose: bool = False,
    workers: int = 1,
    s_enum_max: int | None = None,
) -> list[ReportRow]:
    """Точный момент M_{2s}, его разложение, m̂_s(u) и суммы по «розам»."""
    if s >= 1:
        walks.profile_table(s, workers=workers, s_enum_max=s_enum_max)
    engine = Provenance.EXACT_ENGINE
    indices = {"s": s, "n": params.n, "rho": params.rho}
    moment = walks.exact_moment(params, s, s_enum_max)
    rows = [
        ReportRow("M_2s", indices, moment, engine),
        ReportRow("M_2s/n", indices, moment / params.n, engine),
    ]
    if decompose and s >= 1:
        tree_part, non_tree_part = walks.decompose_moment(params, s, s_enum_max)
        rows.append(ReportRow("tree_part", indices, tree_part, engine))
        rows.append(ReportRow("non_tree_part", indices, non_tree_part, engine))
    if len(params.moments) >= 2:
        poly = series.solve_moment_series(SeriesParams(s))[s]
        rows.append(
            ReportRow(
                "m_hat_s(u)",
                indices,
                series.evaluate_coefficient(poly, params.u),
                Provenance.SERIES,
            )
        )
    if rose:
        for m in range(2, s + 1):
            rows.append(
                ReportRow(
                    "P(m)",
                    {**indices, "s": m},
                    walks.rose_weight_sum(m, params, s_enum_max=s_enum_max),
                    Provenance.ENUMERATION,
                )
            )
            rows.append(
                ReportRow(
                    "P(m) leading",
                    {**indices, "s": m},
                    walks.rose_weight_sum(
                        m, params, leading_only=True, s_enum_max=s_enum_max
                    ),
                    Provenance.ENUMERATION,
                )
            )
    return rows


@log_operation("MC", verbose=True)
def mc_table(
    config: EnsembleConfig, s_max: int, s_enum_max: int | None = None
) -> list[dict[str, Any]]:
    """Оценки E Tr H^{2s} рядом с точным моментом и n·m̂_s(u)."""
    estimates = estimate_moments(config, s_max)
    limit = walks.enum_limit(s_enum_max)
    params = config.moment_params(s_max)
    solved = series.solve_moment_series(SeriesParams(s_max))
    rows = []
    for estimate in estimates:
        s = estimate.s
        rows.append(
            {
                "s": s,
                "mc_mean": estimate.mean,
                "mc_stderr": estimate.stderr,
                "exact": (
                    walks.exact_moment(params, s, s_enum_max) if s <= limit else None
                ),
                "series": config.n * series.evaluate_coefficient(solved[s], config.u),
                "n": config.n,
                "rho": config.rho,
                "V4": config.v4,
                "samples": estimate.samples,
                "seed": config.master_seed,
            }
        )
    return rows


@log_operation("COMPARE", verbose=True)
def compare_table(
    config: EnsembleConfig, s_max: int, s_enum_max: int | None = None
) -> list[dict[str, Any]]:
    """Сравнение M_{2s}/n: выборка, точный движок и m̂_s(u), с отношениями."""
    rows = []
    for row in compare_asymptotic(config, s_max, s_enum_max):
        rows.append(
            {
                "s": row.s,
                "mc_mean": row.mc_mean,
                "mc_stderr": row.mc_stderr,
                "exact": row.exact,
                "series": row.series,
                "n": config.n,
                "rho": config.rho,
                "V4": config.v4,
                "samples": config.samples,
                "seed": config.master_seed,
                "catalan": row.catalan,
                "mc_ratio": row.mc_ratio,
                "exact_ratio": row.exact_ratio,
            }
        )
    return rows


@log_operation("SPECTRAL")
def spectral_table(
    config: EnsembleConfig, eps_list: Sequence[float], chi: Fraction | None = None
) -> SpectralSummary:
    """Исследование спектральной нормы с оценками превышения порогов."""
    return spectral_norm_study(config, eps_list, chi)


@log_operation("BOUNDS")
def bounds_reports(order: int, u_grid: Sequence[Rational]) -> list[CheckReport]:
    """Верхняя и нижняя оценки m̂_s, плюс диагностика m̂_s(u)/t_s против 1 + us."""
    reports = [series.check_upper_bound(order, u_grid)]
    reports.extend(reports[0].related)
    if order >= 2:
        reports.append(series.check_lower_bound(order))
    reports.append(_liminf_report(order, u_grid))
    return reports


def _liminf_report(order: int, u_grid: Sequence[Rational]) -> CheckReport:
    report = CheckReport("m_s(u)/t_s >= 1 + us", CheckKind.DIAGNOSTIC)
    solved = series.solve_moment_series(SeriesParams(order))
    for s in range(order + 1):
        for u in u_grid:
            ratio = solved[s].evaluate(u) / combinatorics.catalan(s)
            bound = 1 + Fraction(u) * s
            report.add(f"s={s},u={u}", ratio, bound, ratio >= bound)
    return report


# Самопроверка


@dataclass(frozen=True)
class SelfCheckDepth:
    """Диапазоны самопроверки."""

    name: str
    enum_s: int
    comb_limit: int
    series_order: int
    upper_order: int
    lower_order: int
    conv_k: int
    conv_p: int


def selfcheck_depth(name: str) -> SelfCheckDepth:
    """Параметры режимов quick и full."""
    if name == "quick":
        return SelfCheckDepth("quick", 5, 40, 16, 16, 32, 30, 5)
    if name == "full":
        return SelfCheckDepth("full", walks.enum_limit(), 200, 64, 48, 64, 100, 10)
    raise ConfigurationError("depth", f"ожидалось quick или full: {name!r}")


@dataclass
class SelfCheckResult:
    """Результат самопроверки."""

    depth: str
    reports: list[CheckReport] = field(default_factory=list)

    @property
    def hard_failures(self) -> list[CheckReport]:
        return [r for r in self.reports if r.kind is CheckKind.HARD and not r.passed]

    @property
    def passed(self) -> bool:
        return not self.hard_failures

    def raise_for_failure(self) -> None:
        """
        Raises:
            IdentityFailureError: По первому проваленному обязательному тождеству
        """
        for report in self.hard_failures:
            row = report.failures[0]
            detail = f"{row.index}: получено {row.observed}, ожидалось {row.expected}"
            raise IdentityFailureError(report.name, detail)


def _check_catalan_recurrence(depth: SelfCheckDepth) -> CheckReport:
    report = CheckReport("catalan recurrence")
    t = [combinatorics.catalan(k) for k in range(depth.comb_limit + 1)]
    for k in range(1, depth.comb_limit + 1):
        convolution = sum(t[k - 1 - j] * t[j] for j in range(k))
        report.add(f"k={k}", t[k], convolution, t[k] == convolution)
    return report


def _check_solve_catalan(depth: SelfCheckDepth) -> CheckReport:
    report = CheckReport("solve_catalan == catalan")
    solved = series.solve_catalan(depth.comb_limit)
    for k in range(depth.comb_limit + 1):
        expected = combinatorics.catalan(k)
        report.add(f"k={k}", solved[k], expected, solved[k] == expected)
    return report


def _check_series_equation(depth: SelfCheckDepth) -> CheckReport:
    report = CheckReport("series residual == 0, u=0 gives catalan")
    order = depth.series_order
    solved = series.solve_moment_series(SeriesParams(order))
    residual = series.moment_equation_residual(solved)
    report.add(f"order={order}", "residual", 0, residual.is_zero())
    direct = series.moment_recurrence(order)
    report.add(f"order={order}", "fixed point", "recurrence", solved == direct)
    specialized = series.solve_moment_series(SeriesParams(order, Fraction(0)))
    matches = specialized == series.solve_catalan(order)
    report.add(f"order={order}", "u=0", "catalan", matches)
    integral = all(poly.is_non_negative_integral() for poly in solved.coeffs)
    report.add(f"order={order}", "coefficients", "non-negative integers", integral)
    return report


def _check_series_enumeration(depth: SelfCheckDepth) -> CheckReport:
    report = CheckReport(f"series==enumeration s≤{depth.enum_s}")
    solved = series.solve_moment_series(SeriesParams(depth.enum_s))
    for s in range(1, depth.enum_s + 1):
        counted = walks.count_24star(s)
        report.add(f"s={s}", counted, solved[s], counted == solved[s])
        low_terms = counted[0] == combinatorics.catalan(s) and (
            s < 2 or counted[1] == combinatorics.n_one_multiedge(s, 2)
        )
        report.add(f"s={s}", "[u^0],[u^1]", "t_s,N_s^(1,2)", low_terms)
    return report


def _check_phi_12(depth: SelfCheckDepth) -> CheckReport:
    report = CheckReport("phi_12 == N_s^(1,2)")
    phi = series.phi_12(depth.series_order)
    for s in range(2, depth.series_order + 1):
        expected = combinatorics.n_one_multiedge(s, 2)
        report.add(f"s={s}", phi[s], expected, phi[s] == expected)
    return report


def _check_n12_ratio(depth: SelfCheckDepth) -> CheckReport:
    report = CheckReport("N_s^(1,2)/(s t_s) -> 1")
    for s, tolerance in ((40, Fraction(1, 10)), (80, Fraction(1, 20))):
        ratio = Fraction(combinatorics.n_12_closed(s), s * combinatorics.catalan(s))
        within = abs(ratio - 1) <= tolerance
        report.add(f"s={s}", float(ratio), f"1 +- {tolerance}", within)
    return report


def _check_one_edge_profiles(depth: SelfCheckDepth) -> CheckReport:
    report = CheckReport("count_profile(one-edge:m) == N_s^(1,m)")
    for s in range(1, depth.enum_s + 1):
        for m in range(1, s + 1):
            counted = walks.count_profile(s, f"one-edge:{m}")
            expected = combinatorics.n_one_multiedge(s, m)
            report.add(f"s={s},m={m}", counted, expected, counted == expected)
    return report


def _check_roses(depth: SelfCheckDepth) -> CheckReport:
    report = CheckReport("rose sums P(2), P(3), P(4)")
    params = MomentParams(10**6, 7, (1, 2, 3, 5))
    v4, v6, rho = params.moment(2), params.moment(3), params.rho
    expected = {2: v4 / rho, 3: v6 / rho**2, 4: 3 * v4**2 / rho**2}
    for m, value in expected.items():
        if m > depth.enum_s:
            continue
        observed = walks.rose_weight_sum(m, params, leading_only=True)
        report.add(f"m={m}", observed, value, observed == value)
    return report


def _check_red_blue_pairing(depth: SelfCheckDepth) -> CheckReport:
    report = CheckReport(
        f"red q-vertex implies blue r-vertex s≤{depth.enum_s}", CheckKind.DIAGNOSTIC
    )
    agreement = CheckReport("tree-type == no blue r-vertex", CheckKind.DIAGNOSTIC)
    for s in range(1, depth.enum_s + 1):
        sweep = walks.verify_red_blue_pairing(s)
        report.extend(sweep.rows)
        report.notes.extend(sweep.notes)
        for related in sweep.related:
            agreement.extend(related.rows)
    report.related.append(agreement)
    return report


def _check_dyck(depth: SelfCheckDepth) -> CheckReport:
    report = CheckReport("dyck validity")
    for s in range(1, min(depth.enum_s, 6) + 1):
        invalid = [
            str(walk)
            for walk in walks.enumerate_walks(s)
            if not walks.classify(walk).is_dyck_path
        ]
        report.add(f"s={s}", f"invalid={len(invalid)}", 0, not invalid)
    return report


def _check_exact_engine(depth: SelfCheckDepth) -> CheckReport:
    report = CheckReport("exact engine: parts sum, rho=n is Wigner")
    moments = (
        1, Fraction(9, 5), Fraction(27, 7), 9, Fraction(243, 11), Fraction(729, 13)
    )
    for s in range(1, min(depth.enum_s, 5) + 1):
        params = MomentParams(50, 5, moments)
        tree_part, non_tree_part = walks.decompose_moment(params, s)
        total = walks.exact_moment(params, s)
        parts = tree_part + non_tree_part
        report.add(f"s={s},parts", parts, total, parts == total)
        wigner = MomentParams(50, 50, moments)
        expected = walks.wigner_moment(50, wigner.moments, s)
        observed = walks.exact_moment(wigner, s)
        report.add(f"s={s},rho=n", observed, expected, observed == expected)
    return report


def _check_asymptotic_trend(depth: SelfCheckDepth) -> CheckReport:
    report = CheckReport("M_8/n -> m_4(1/64) at rho=64")
    target = series.solve_moment_series(SeriesParams(4))[4].evaluate(Fraction(1, 64))
    gaps = []
    for n in (500, 1000, 2000, 4000):
        params = MomentParams(n, 64, (1, 1, 1, 1))
        gap = abs(walks.exact_moment(params, 4) / n - target) / target
        gaps.append(gap)
        report.add(f"n={n}", float(gap), "relative gap", True)
    report.add("n=4000", float(gaps[-1]), "<= 0.05", gaps[-1] <= Fraction(1, 20))
    shrinking = all(a > b for a, b in zip(gaps, gaps[1:]))
    report.add("n=500..4000", "gaps", "strictly decreasing", shrinking)
    return report


def _check_non_tree_trend(depth: SelfCheckDepth) -> CheckReport:
    report = CheckReport("non-tree/tree decreasing, rho=sqrt(n)")
    ratios = []
    for n in (50, 100, 200, 400):
        params = MomentParams(n, sqrt_rho(n), (1, 1, 1, 1))
        tree_part, non_tree_part = walks.decompose_moment(params, 4)
        ratios.append(non_tree_part / tree_part)
        report.add(f"n={n}", float(ratios[-1]), "non_tree/tree", True)
    shrinking = all(a > b for a, b in zip(ratios, ratios[1:]))
    report.add("n=50..400", "ratios", "strictly decreasing", shrinking)
    return report


def _diag_two_four_edges(depth: SelfCheckDepth) -> CheckReport:
    report = CheckReport("phi_22 and N-hat_22 vs enumeration", CheckKind.DIAGNOSTIC)
    if depth.enum_s < 4:
        return report
    phi = series.phi_22(depth.enum_s)
    for s in range(4, depth.enum_s + 1):
        any_adjacency = walks.count_profile(s, "two-4-any")
        shared = walks.count_profile(s, "two-4-shared")
        report.add(f"s={s},phi_22", phi[s], any_adjacency, phi[s] == any_adjacency)
        closed = combinatorics.n_hat_22(s)
        report.add(f"s={s},n_hat_22", closed, shared, closed == shared)
    return report


def _diag_n22_ratio(depth: SelfCheckDepth) -> CheckReport:
    report = CheckReport("N_s^(2,2)/(s^2 t_s) -> 1/2", CheckKind.DIAGNOSTIC)
    phi = series.phi_22(80)
    for s, tolerance in ((40, Fraction(1, 10)), (80, Fraction(1, 20))):
        ratio = phi[s][0] / (s * s * combinatorics.catalan(s))
        passed = abs(ratio - Fraction(1, 2)) <= tolerance
        report.add(f"s={s}", float(ratio), f"1/2 +- {tolerance}", passed)
    return report


def _diag_printed_forms(depth: SelfCheckDepth) -> CheckReport:
    report = CheckReport("printed E_k^(m) and R_s inline forms", CheckKind.DIAGNOSTIC)
    for k in range(1, 9):
        for m in range(1, k + 1):
            _, e_value = combinatorics.de_recurrence(k, m)
            printed = combinatorics.e_closed_printed(k, m)
            report.add(f"E k={k},m={m}", printed, e_value, printed == e_value)
    for s in range(2, 12):
        inline = combinatorics.r_inline_form(s)
        value = combinatorics.r_sequence(s)
        report.add(f"R s={s}", inline, value, inline == value)
    return report


def _selfcheck_plan(
    depth: SelfCheckDepth,
) -> list[tuple[str, CheckKind, Callable[[], CheckReport | list[CheckReport]]]]:
    hard, diagnostic = CheckKind.HARD, CheckKind.DIAGNOSTIC
    return [
        ("catalan recurrence", hard, lambda: _check_catalan_recurrence(depth)),
        ("solve_catalan == catalan", hard, lambda: _check_solve_catalan(depth)),
        ("series equation", hard, lambda: _check_series_equation(depth)),
        (f"series==enumeration s≤{depth.enum_s}", hard,
         lambda: _check_series_enumeration(depth)),
        ("phi_12", hard, lambda: _check_phi_12(depth)),
        ("lower bound", hard, lambda: series.check_lower_bound(depth.lower_order)),
        ("upper bound", hard,
         lambda: series.check_upper_bound(depth.upper_order, DEFAULT_U_GRID)),
        ("combinatorics identities", hard,
         lambda: combinatorics.check_identities(depth.comb_limit)),
        ("convolution bound", hard,
         lambda: combinatorics.check_convolution_bound(depth.conv_k, depth.conv_p)),
        ("N12 ratio", hard, lambda: _check_n12_ratio(depth)),
        ("one-edge profiles", hard, lambda: _check_one_edge_profiles(depth)),
        ("rose sums", hard, lambda: _check_roses(depth)),
        ("red-blue pairing", diagnostic, lambda: _check_red_blue_pairing(depth)),
        ("dyck validity", hard, lambda: _check_dyck(depth)),
        ("exact engine", hard, lambda: _check_exact_engine(depth)),
        ("asymptotic trend", hard, lambda: _check_asymptotic_trend(depth)),
        ("non-tree trend", hard, lambda: _check_non_tree_trend(depth)),
        ("exit-degree bound", diagnostic,
         lambda: combinatorics.check_exit_degree_bound(min(depth.comb_limit, 60))),
        ("two 4-edges", diagnostic, lambda: _diag_two_four_edges(depth)),
        ("N22 ratio", diagnostic, lambda: _diag_n22_ratio(depth)),
        ("printed forms", diagnostic, lambda: _diag_printed_forms(depth)),
    ]


@log_operation("SELFCHECK")
def run_selfcheck(depth: str = "quick") -> SelfCheckResult:
    """
    Прогнать набор тождеств.

    Ошибка внутри проверки не прерывает набор: она превращается в
    проваленную строку. Диагностические отчёты на код выхода не влияют.
    """
    settings = selfcheck_depth(depth)
    result = SelfCheckResult(depth)
    for name, kind, check in _selfcheck_plan(settings):
        started = time.perf_counter()
        try:
            produced = check()
            reports = produced if isinstance(produced, list) else [produced]
        except Exception as e:
            _logger.error("Проверка '%s' прервана: %s: %s", name, type(e).__name__, e)
            failed = CheckReport(name, kind)
            failed.add("error", f"{type(e).__name__}: {e}", "no error", False)
            reports = [failed]
        for report in reports:
            report.kind = kind if report.kind is CheckKind.HARD else report.kind
            result.reports.append(report)
            result.reports.extend(report.related)
        _logger.info("Проверка '%s': %.2fs", name, time.perf_counter() - started)
    return result
