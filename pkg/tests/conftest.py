"""Общие фикстуры тестов."""

from fractions import Fraction

import pytest

from dilute_lab.core import combinatorics
from dilute_lab.core.models import MomentParams
from dilute_lab.montecarlo.config import EnsembleConfig
from dilute_lab.montecarlo.distributions import get_distribution


@pytest.fixture
def generic_params() -> MomentParams:
    """Параметры с попарно различными моментами, чтобы мономы не сливались."""
    return MomentParams(
        10**6,
        7,
        (1, Fraction(9, 5), Fraction(27, 7), 5, Fraction(243, 11), Fraction(729, 13)),
    )


@pytest.fixture
def rademacher_params() -> MomentParams:
    return MomentParams(300, 10, (1, 1, 1, 1, 1, 1))


@pytest.fixture
def small_ensemble() -> EnsembleConfig:
    return EnsembleConfig(
        n=60,
        rho=8.0,
        distribution=get_distribution("rademacher"),
        master_seed=7,
        samples=24,
        threads=1,
    )


@pytest.fixture
def clean_combinatorics(monkeypatch):
    """Снимает подмены и сбрасывает кэши комбинаторики после теста."""
    yield
    monkeypatch.undo()
    combinatorics.clear_caches()
