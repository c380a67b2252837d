"""Тесты точных рядов и уравнения для m̂_s."""

from fractions import Fraction

import pytest

from dilute_lab.core import series
from dilute_lab.core.combinatorics import catalan, n_one_multiedge
from dilute_lab.core.exceptions import ConfigurationError, ContractViolationError
from dilute_lab.core.series import (
    SeriesParams,
    TruncatedSeries,
    UPolynomial,
    check_lower_bound,
    check_upper_bound,
    evaluate_coefficient,
    exp_exceeds,
    fixed_point_step,
    moment_equation_residual,
    moment_recurrence,
    phi_12,
    phi_22,
    series_geom_inverse,
    series_mul,
    solve_catalan,
    solve_moment_series,
)

KNOWN_MOMENTS = {
    0: (1,),
    1: (1,),
    2: (2, 1),
    3: (5, 6),
    4: (14, 28),
    5: (42, 120, 5),
}


def test_polynomial_canonical_form():
    assert UPolynomial([1, 2, 0, 0]).coeffs == (1, 2)
    assert UPolynomial([0, 0]).is_zero
    assert UPolynomial().degree == -1
    assert UPolynomial([3, 0, 1]).degree == 2


def test_polynomial_arithmetic():
    a = UPolynomial([1, 1])
    b = UPolynomial([Fraction(1, 2), 0, 2])
    assert a + b == UPolynomial([Fraction(3, 2), 1, 2])
    assert a - a == UPolynomial.zero()
    assert a * a == UPolynomial([1, 2, 1])
    assert 3 * a == UPolynomial([3, 3])
    assert str(UPolynomial([5, 6])) == "5 + 6u"
    assert UPolynomial([42, 120, 5]).evaluate(Fraction(1, 2)) == Fraction(413, 4)


def test_series_order_mismatch():
    with pytest.raises(ContractViolationError):
        series_mul(TruncatedSeries.zero(3), TruncatedSeries.zero(4))
    with pytest.raises(ContractViolationError):
        TruncatedSeries.zero(2) + TruncatedSeries.zero(3)
    with pytest.raises(ContractViolationError):
        TruncatedSeries(2, [1, 2])


def test_geom_inverse_of_catalan_series():
    f = solve_catalan(6)
    inverse = series_geom_inverse(f)
    assert inverse[3] == 5
    assert inverse == f


def test_solve_catalan_matches_closed_form():
    f = solve_catalan(30)
    for k in range(31):
        assert f[k] == catalan(k)


def test_moment_series_known_coefficients():
    solved = solve_moment_series(SeriesParams(5))
    for s, coeffs in KNOWN_MOMENTS.items():
        assert solved[s] == UPolynomial(coeffs)


def test_moment_series_residual_and_specialisation():
    order = 16
    solved = solve_moment_series(SeriesParams(order))
    assert moment_equation_residual(solved).is_zero()
    assert fixed_point_step(solved, UPolynomial.variable()) == solved
    assert solve_moment_series(SeriesParams(order, Fraction(0))) == solve_catalan(order)
    u = Fraction(3, 7)
    assert solve_moment_series(SeriesParams(order, u)) == solved.specialize(u)
    for poly in solved.coeffs:
        assert poly.is_non_negative_integral()


def test_fixed_point_iteration_from_one():
    order = 8
    u = UPolynomial.variable()
    iterate = TruncatedSeries.constant(order, 1)
    for _ in range(order + 1):
        iterate = fixed_point_step(iterate, u)
    solved = solve_moment_series(SeriesParams(order))
    assert iterate == solved
    assert moment_recurrence(16) == solve_moment_series(SeriesParams(16))


def test_solver_runs_through_geom_inverse(monkeypatch):
    calls = {"step": 0, "inverse": 0}
    step, inverse = series.fixed_point_step, series.series_geom_inverse

    def counting_step(*args):
        calls["step"] += 1
        return step(*args)

    def counting_inverse(*args):
        calls["inverse"] += 1
        return inverse(*args)

    monkeypatch.setattr(series, "fixed_point_step", counting_step)
    monkeypatch.setattr(series, "series_geom_inverse", counting_inverse)
    u = Fraction(5, 13)
    solved = solve_moment_series(SeriesParams(6, u))
    assert calls == {"step": 6, "inverse": 6}
    assert solved == moment_recurrence(6, UPolynomial.constant(u))


def test_low_order_terms_of_moment_series():
    solved = solve_moment_series(SeriesParams(40))
    assert solved[2][1] == 1
    for s in range(2, 41):
        assert solved[s][0] == catalan(s)
        assert solved[s][1] == n_one_multiedge(s, 2)


def test_series_params_validation():
    with pytest.raises(ConfigurationError):
        SeriesParams(-1)
    with pytest.raises(ConfigurationError):
        SeriesParams(1000)
    with pytest.raises(ConfigurationError):
        SeriesParams(4, Fraction(-1))


def test_phi_12_counts_one_heavy_edge():
    phi = phi_12(20)
    assert [phi[s] for s in (2, 3, 4)] == [1, 6, 28]
    for s in range(2, 21):
        assert phi[s] == n_one_multiedge(s, 2)
    with pytest.raises(ContractViolationError):
        phi_12(1)


def test_phi_22_values():
    phi = phi_22(12)
    assert phi[4] == 5
    assert all(phi[s].is_zero for s in range(4))
    with pytest.raises(ContractViolationError):
        phi_22(3)


def test_evaluate_coefficient():
    assert evaluate_coefficient(UPolynomial(), Fraction(5)) == 0
    value = evaluate_coefficient(UPolynomial([14, 28]), Fraction(1, 64))
    assert value == Fraction(231, 16)
    with pytest.raises(ConfigurationError):
        evaluate_coefficient(UPolynomial([1]), Fraction(-1))


def test_exp_exceeds_is_certified():
    assert exp_exceeds(Fraction(0), Fraction(1)) is True
    assert exp_exceeds(Fraction(1), Fraction(27, 10)) is True
    assert exp_exceeds(Fraction(1), Fraction(3)) is False
    assert exp_exceeds(Fraction(10), Fraction(22026)) is True
    assert exp_exceeds(Fraction(10), Fraction(22027)) is False


def test_upper_bound_grid():
    grid = [Fraction(1, 100), Fraction(1, 10), Fraction(1, 2), Fraction(1)]
    report = check_upper_bound(16, grid)
    assert report.passed
    assert not report.undetermined
    assert len(report.rows) == 17 * len(grid)
    weak = report.related[0]
    assert weak.kind.value == "diagnostic"
    assert weak.passed


def test_lower_bound():
    report = check_lower_bound(32)
    assert report.passed
    assert report.rows[0].index == "s=1"
    assert "31/31" in report.notes[0]
    with pytest.raises(ContractViolationError):
        check_lower_bound(1)
