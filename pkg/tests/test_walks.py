"""Тесты перечисления, классификации и точного движка моментов."""

from fractions import Fraction

import pytest

from dilute_lab.core import walks
from dilute_lab.core.combinatorics import catalan, n_one_multiedge
from dilute_lab.core.exceptions import ConfigurationError, ContractViolationError
from dilute_lab.core.models import MomentParams
from dilute_lab.core.series import (
    SeriesParams,
    UPolynomial,
    phi_22,
    solve_moment_series,
)
from dilute_lab.core.usecases import sqrt_rho
from dilute_lab.core.walks import (
    CanonicalWalk,
    VertexColor,
    classify,
    color_vertices,
    count_24star,
    count_profile,
    decompose_moment,
    enumerate_walks,
    exact_moment,
    profile_table,
    rose_monomials,
    rose_weight_sum,
    verify_red_blue_pairing,
    weight_monomial,
    wigner_moment,
)
from dilute_lab.infra.settings import SettingsLoader

LONG_WALK = "1,2,3,4,3,5,1,2,3,4,3,2,3,2,3,5,1"


def test_canonical_walk_validation():
    for text in ("1,2", "1,3,1", "1,2,2,1,1", "2,1,2", "1,2,1,2"):
        with pytest.raises(ContractViolationError):
            CanonicalWalk.parse(text)
    with pytest.raises(ConfigurationError):
        CanonicalWalk.parse("1,x,1")
    walk = CanonicalWalk.parse("1,2,3,2,1")
    assert walk.s == 2
    assert walk.vertex_count == 3
    assert str(walk) == "1,2,3,2,1"


def test_small_enumerations():
    assert [str(w) for w in enumerate_walks(1)] == ["1,2,1"]
    assert [str(w) for w in enumerate_walks(2)] == [
        "1,2,1,2,1",
        "1,2,1,3,1",
        "1,2,3,2,1",
    ]


def test_enumeration_is_sorted_and_even():
    for s in range(1, 6):
        found = list(enumerate_walks(s))
        assert found == sorted(found)
        for walk in found:
            assert all(count % 2 == 0 for count in walk.multiplicities().values())


def test_catalan_filter_counts_plane_trees():
    catalan_filter = walks.WALK_FILTERS["catalan"]
    for s in range(1, 7):
        assert sum(1 for _ in enumerate_walks(s, catalan_filter)) == catalan(s)


def test_enumeration_limit():
    with pytest.raises(ConfigurationError):
        list(enumerate_walks(8))
    with pytest.raises(ConfigurationError):
        list(enumerate_walks(0))


def test_classify_double_edge():
    info = classify(CanonicalWalk.parse("1,2,1,2,1"))
    assert info.dyck == (1, -1, 1, -1)
    assert info.is_dyck_path
    assert info.is_even
    assert info.is_tree_type
    assert info.four_edge_count == 1
    assert info.kappa[2] == 2
    assert info.colors[2] is VertexColor.GREEN_P
    assert info.colors[1] is VertexColor.NONE


def test_classify_long_walk():
    info = classify(CanonicalWalk.parse(LONG_WALK))
    assert info.is_even
    assert not info.is_tree_type
    assert info.is_dyck_path
    assert {v: info.kappa[v] for v in (1, 2, 4)} == {1: 2, 2: 3, 4: 2}
    assert info.colors[4] is VertexColor.GREEN_P
    assert info.colors[2] is VertexColor.RED_Q
    assert info.colors[1] is VertexColor.BLUE_R
    assert info.has_red and info.has_blue


def test_triangle_walk_is_not_tree():
    info = classify(CanonicalWalk.parse("1,2,3,1,2,3,1"))
    assert info.is_even
    assert not info.is_tree_type
    assert info.has_blue


def test_color_vertices_requires_even_walk():
    with pytest.raises(ContractViolationError):
        color_vertices(CanonicalWalk.parse("1,2,3,4,1"))
    assert color_vertices(CanonicalWalk.parse("1,2,1")) == {
        1: VertexColor.NONE,
        2: VertexColor.NONE,
    }


def test_dyck_paths_valid_for_all_even_walks():
    for s in range(1, 5):
        for walk in enumerate_walks(s):
            assert classify(walk).is_dyck_path, str(walk)


RED_WITHOUT_BLUE = (
    "1,2,1,2,1,3,2,1,2,3,1",
    "1,2,1,2,1,3,2,1,3,2,1",
    "1,2,3,2,3,2,1,3,2,3,1",
)


def test_literal_colouring_gives_red_without_blue():
    info = classify(CanonicalWalk.parse(RED_WITHOUT_BLUE[0]))
    assert info.is_even
    assert not info.is_tree_type
    assert info.colors[1] is VertexColor.RED_Q
    assert info.colors[2] is VertexColor.GREEN_P
    assert info.colors[3] is VertexColor.NONE
    assert info.has_red and not info.has_blue


def test_red_blue_pairing_reports_counterexamples():
    report = verify_red_blue_pairing(5)
    assert report.kind.value == "diagnostic"
    assert report.related[0].kind.value == "diagnostic"
    listed = {row.index for row in report.failures}
    assert set(RED_WITHOUT_BLUE) <= listed
    assert "s=5" in listed
    assert report.notes and report.notes[0].startswith("s=5")
    for s in range(1, 3):
        assert verify_red_blue_pairing(s).passed


def test_24star_counts_match_series():
    solved = solve_moment_series(SeriesParams(6))
    assert count_24star(0) == UPolynomial.constant(1)
    for s in range(1, 7):
        assert count_24star(s) == solved[s]


def test_one_edge_profiles():
    for s in range(1, 7):
        for m in range(1, s + 1):
            assert count_profile(s, f"one-edge:{m}") == n_one_multiedge(s, m)


def test_two_heavy_edge_profiles():
    assert count_profile(4, "two-4-shared") == 6
    assert count_profile(4, "two-4-any") == 6
    assert phi_22(4)[4] == 5
    with pytest.raises(ConfigurationError):
        count_profile(4, "three-edges")
    with pytest.raises(ConfigurationError):
        count_profile(4, "one-edge:x")


def test_rose_sums(generic_params):
    v4, v6, v8 = (generic_params.moment(k) for k in (2, 3, 4))
    rho = generic_params.rho
    assert rose_monomials(4) == {(2, 2): 3, (4,): 1}
    assert rose_weight_sum(2, generic_params) == v4 / rho
    assert rose_weight_sum(3, generic_params) == v6 / rho**2
    assert rose_weight_sum(4, generic_params) == 3 * v4**2 / rho**2 + v8 / rho**3
    assert rose_weight_sum(4, generic_params, leading_only=True) == 3 * v4**2 / rho**2


def test_weight_monomial():
    params = MomentParams(50, 5, (1, 3))
    walk = CanonicalWalk.parse("1,2,1,2,1")
    assert weight_monomial(walk, params) == Fraction(3, 5 * 50)
    with pytest.raises(ContractViolationError):
        weight_monomial(CanonicalWalk.parse("1,2,3,4,1"), params)


def test_exact_moment_low_orders(rademacher_params):
    n = rademacher_params.n
    assert exact_moment(rademacher_params, 0) == n
    assert exact_moment(rademacher_params, 1) == 299
    v4, rho = rademacher_params.moment(2), rademacher_params.rho
    expected = (n - 1) * (v4 / rho + Fraction(2 * (n - 2), n))
    assert exact_moment(rademacher_params, 2) == expected


def test_missing_moment_is_reported():
    with pytest.raises(ConfigurationError):
        exact_moment(MomentParams(20, 4, (1,)), 2)


def test_decomposition(generic_params):
    for s in range(1, 6):
        params = generic_params.with_size(40, 6)
        tree_part, non_tree_part = decompose_moment(params, s)
        assert tree_part + non_tree_part == exact_moment(params, s)
        if s <= 2:
            assert non_tree_part == 0
    assert decompose_moment(generic_params.with_size(40, 6), 3)[1] > 0


def test_full_density_matches_wigner(generic_params):
    params = generic_params.with_size(30, 30)
    for s in range(1, 6):
        assert exact_moment(params, s) == wigner_moment(30, params.moments, s)


def test_parallel_profile_table_matches_serial():
    serial = walks._profiles_from_prefix(5, (walks.ROOT,))
    walks._profile_cache.pop(5, None)
    assert dict(profile_table(5, workers=2)) == dict(serial)


def test_moment_approaches_series_value():
    target = solve_moment_series(SeriesParams(4))[4].evaluate(Fraction(1, 64))
    assert target == 14 + Fraction(28, 64)
    gaps = []
    for n in (500, 1000, 2000, 4000):
        params = MomentParams(n, 64, (1, 1, 1, 1))
        gaps.append(abs(exact_moment(params, 4) / n - target) / target)
    assert gaps[-1] <= Fraction(1, 20)
    assert all(a > b for a, b in zip(gaps, gaps[1:]))


def test_non_tree_share_vanishes():
    ratios = []
    for n in (50, 100, 200, 400):
        params = MomentParams(n, sqrt_rho(n), (1, 1, 1, 1))
        tree_part, non_tree_part = decompose_moment(params, 4)
        ratios.append(non_tree_part / tree_part)
    assert all(a > b for a, b in zip(ratios, ratios[1:]))


def test_explicit_enumeration_limit_reaches_profile_table(
    monkeypatch, rademacher_params
):
    monkeypatch.setitem(SettingsLoader()._config, "s_enum_max", 3)
    with pytest.raises(ConfigurationError):
        exact_moment(rademacher_params, 4)
    with pytest.raises(ConfigurationError):
        profile_table(4)
    assert exact_moment(rademacher_params, 4, s_enum_max=4) > 0
    assert count_profile(4, "one-edge:2", s_enum_max=4) == n_one_multiedge(4, 2)
    tree_part, non_tree_part = decompose_moment(rademacher_params, 4, s_enum_max=4)
    assert tree_part + non_tree_part == exact_moment(rademacher_params, 4, 4)
    assert count_24star(4, s_enum_max=4) == solve_moment_series(SeriesParams(4))[4]
    assert rose_monomials(4, s_enum_max=4) == {(2, 2): 3, (4,): 1}
