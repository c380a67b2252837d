"""Тесты комбинаторики чисел Каталана."""

from fractions import Fraction
from math import factorial

import pytest

from dilute_lab.core import combinatorics
from dilute_lab.core.combinatorics import (
    catalan,
    catalan_convolution,
    catalan_root_degree,
    check_convolution_bound,
    check_exit_degree_bound,
    check_identities,
    de_recurrence,
    e_closed_printed,
    first_correction,
    n_12_closed,
    n_hat_22,
    n_one_multiedge,
    r_inline_form,
    r_sequence,
)
from dilute_lab.core.exceptions import ContractViolationError, InconsistencyError


def test_catalan_known_values():
    assert [catalan(s) for s in range(9)] == [1, 1, 2, 5, 14, 42, 132, 429, 1430]


def test_root_degree_sums_to_catalan():
    examples = {(3, 1): 2, (3, 2): 2, (3, 3): 1, (4, 1): 5, (4, 4): 1}
    for (s, d), expected in examples.items():
        assert catalan_root_degree(s, d) == expected
    for s in range(1, 40):
        assert sum(catalan_root_degree(s, d) for d in range(1, s + 1)) == catalan(s)


def test_root_degree_contract():
    with pytest.raises(ContractViolationError):
        catalan_root_degree(3, 4)
    with pytest.raises(ContractViolationError):
        catalan_root_degree(3, 0)
    with pytest.raises(ContractViolationError):
        catalan(-1)


def test_convolution():
    assert catalan_convolution(4, 3) == 90
    for k in range(15):
        assert catalan_convolution(k, 1) == catalan(k)
        assert catalan_convolution(k, 2) == catalan(k + 1)
    with pytest.raises(ContractViolationError):
        catalan_convolution(3, 0)


def test_r_sequence():
    assert [r_sequence(s) for s in (2, 3, 4)] == [1, 3, 9]
    for s in range(2, 25):
        assert r_sequence(s) == catalan_convolution(s - 2, 3)


def test_one_multiedge_counts():
    examples = {(2, 2): 1, (3, 2): 6, (4, 2): 28, (4, 3): 8, (3, 3): 1}
    for (s, m), expected in examples.items():
        assert n_one_multiedge(s, m) == expected
    for s in range(2, 40):
        assert n_12_closed(s) == n_one_multiedge(s, 2)
        assert n_one_multiedge(s, 2) == factorial(2 * s) // (
            factorial(s - 2) * factorial(s + 2)
        )


def test_de_recurrence_against_closed_forms():
    assert de_recurrence(3, 1)[0] == 15
    assert de_recurrence(1, 1)[1] == 1
    for k in range(1, 30):
        for m in range(1, k + 1):
            d_value, e_value = de_recurrence(k, m)
            assert d_value == factorial(2 * k) // (factorial(k - m) * factorial(k + m))
            assert e_value == factorial(2 * k + 1) // (
                factorial(k - m) * factorial(k + m + 1)
            )
    with pytest.raises(ContractViolationError):
        de_recurrence(2, 3)


def test_printed_e_form_disagrees_at_base():
    # (2k+1)!/((k+1-m)!(k+m)!) при k = m = 1
    printed = factorial(3) // (factorial(1) * factorial(2))
    consistent = factorial(3) // (factorial(0) * factorial(3))
    assert e_closed_printed(1, 1) == printed == 3
    assert de_recurrence(1, 1)[1] == consistent == 1
    for k in range(1, 10):
        assert e_closed_printed(k, 1) != de_recurrence(k, 1)[1]


def test_inline_r_form_is_rational():
    assert isinstance(r_inline_form(5), Fraction)


def test_n_hat_22_and_first_correction():
    assert n_hat_22(4) == 4
    correction = first_correction(4, 1, 1, 1)
    assert correction.value == 12
    assert correction.components == {"V4^2": 4, "V6": 8}
    scaled = first_correction(6, Fraction(9, 5), Fraction(27, 7), 10)
    assert scaled.value == sum(scaled.components.values())
    with pytest.raises(ContractViolationError):
        first_correction(3, 1, 1, 1)
    with pytest.raises(ContractViolationError):
        first_correction(5, 1, 1, 0)


def test_exit_degree_bound_fails_only_at_base():
    report = check_exit_degree_bound(30)
    assert report.kind.value == "diagnostic"
    assert [row.index for row in report.failures] == ["s=1,d=1"]
    assert "s=1,d=1" in report.notes[0]


def test_identity_suite():
    reports = check_identities(60)
    assert len(reports) == 4
    for report in reports:
        assert report.passed, report.name
        assert report.rows


def test_convolution_bound():
    report = check_convolution_bound(40, 6)
    assert report.passed
    assert len(report.rows) == 41 * 6


def test_broken_catalan_is_detected(monkeypatch, clean_combinatorics):
    original = combinatorics.catalan
    combinatorics.clear_caches()
    monkeypatch.setattr(
        combinatorics, "catalan", lambda s: original(s) + (1 if s == 7 else 0)
    )
    with pytest.raises(InconsistencyError):
        combinatorics.n_12_closed(7)
    reports = check_identities(10)
    assert not all(report.passed for report in reports)


def test_clear_caches_keeps_values():
    before = [catalan_root_degree(12, d) for d in range(1, 13)]
    combinatorics.clear_caches()
    assert [catalan_root_degree(12, d) for d in range(1, 13)] == before


def test_clear_caches_with_replaced_catalan(monkeypatch):
    original = combinatorics.catalan
    monkeypatch.setattr(combinatorics, "catalan", lambda s: original(s) + 1)
    combinatorics.clear_caches()
    assert catalan_root_degree(12, 1) == original(11) + 1

    monkeypatch.undo()
    combinatorics.clear_caches()
    assert catalan_root_degree(12, 1) == catalan(11) == 58786
