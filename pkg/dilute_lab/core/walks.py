"""Перечисление и классификация чётных замкнутых путей.

Путь записывается канонически: корень имеет метку 1, каждая новая вершина
получает следующую свободную метку. Перебор в глубину с отсечениями выдаёт
все чётные пути без петель в лексикографическом порядке. По каждому s
перечисление один раз сворачивается в таблицу профилей, из которой
считаются точные моменты, число (2,4*)-путей и суммы по «розам».
"""

from __future__ import annotations

import threading
from collections import Counter, defaultdict
from collections.abc import Callable, Iterator, Mapping
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from types import MappingProxyType
from typing import NamedTuple

import networkx as nx

from dilute_lab.core.exceptions import ConfigurationError, ContractViolationError
from dilute_lab.core.models import CheckKind, CheckReport, MomentParams
from dilute_lab.core.series import UPolynomial
from dilute_lab.core.utils import falling_factorial, validate_int
from dilute_lab.infra.settings import SettingsLoader
from dilute_lab.logging_config import get_logger

_logger = get_logger(__name__)

ROOT = 1
DEFAULT_S_ENUM_MAX = 7

Letters = tuple[int, ...]
Pair = tuple[int, int]
WalkFilter = Callable[[Letters], bool]


def _pair(a: int, b: int) -> Pair:
    return (a, b) if a < b else (b, a)


class CanonicalWalk:
    """Замкнутый путь в каноническом кодировании первыми появлениями."""

    __slots__ = ("_letters",)

    def __init__(self, letters: Letters | list[int]) -> None:
        letters = tuple(letters)
        if len(letters) < 3 or len(letters) % 2 == 0:
            raise ContractViolationError(
                "CanonicalWalk", f"длина пути должна быть 2s+1, s >= 1: {letters}"
            )
        if letters[0] != ROOT or letters[-1] != ROOT:
            raise ContractViolationError(
                "CanonicalWalk",
                f"путь должен начинаться и заканчиваться в 1: {letters}",
            )
        seen = 0
        for t, letter in enumerate(letters):
            if letter > seen + 1 or letter < 1:
                raise ContractViolationError(
                    "CanonicalWalk", f"метка {letter} на шаге {t} не каноническая"
                )
            seen = max(seen, letter)
            if t and letters[t - 1] == letter:
                raise ContractViolationError(
                    "CanonicalWalk", f"петля на шаге {t}: {letters}"
                )
        self._letters = letters

    @classmethod
    def parse(cls, text: str) -> CanonicalWalk:
        """Разобрать путь из строки вида ``1,2,1``."""
        try:
            letters = [int(part) for part in text.split(",")]
        except ValueError as e:
            raise ConfigurationError("walk", f"не удалось разобрать {text!r}") from e
        return cls(letters)

    @property
    def letters(self) -> Letters:
        return self._letters

    @property
    def s(self) -> int:
        return (len(self._letters) - 1) // 2

    @property
    def vertex_count(self) -> int:
        return max(self._letters)

    def steps(self) -> Iterator[tuple[int, int]]:
        return zip(self._letters, self._letters[1:])

    def multiplicities(self) -> Counter[Pair]:
        return Counter(_pair(a, b) for a, b in self.steps())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CanonicalWalk):
            return NotImplemented
        return self._letters == other._letters

    def __lt__(self, other: CanonicalWalk) -> bool:
        return self._letters < other._letters

    def __hash__(self) -> int:
        return hash(self._letters)

    def __str__(self) -> str:
        return ",".join(str(v) for v in self._letters)

    def __repr__(self) -> str:
        return f"CanonicalWalk({self})"


class VertexColor(str, Enum):
    """Цвет вершины по ребру второго отмеченного прибытия."""

    NONE = "none"
    BLUE_R = "blue-r"
    GREEN_P = "green-p"
    RED_Q = "red-q"


@dataclass(frozen=True)
class WalkClassification:
    """Полная классификация пути."""

    edge_multiplicities: Mapping[Pair, int]
    dyck: tuple[int, ...]
    kappa: Mapping[int, int]
    is_even: bool
    is_tree_type: bool
    four_edge_count: int
    four_edges_disjoint: bool
    colors: Mapping[int, VertexColor]
    max_exit_degree: int

    @property
    def has_blue(self) -> bool:
        return VertexColor.BLUE_R in self.colors.values()

    @property
    def has_red(self) -> bool:
        return VertexColor.RED_Q in self.colors.values()

    @property
    def is_dyck_path(self) -> bool:
        total = 0
        for step in self.dyck:
            total += step
            if total < 0:
                return False
        return total == 0


class _MarkedSteps(NamedTuple):
    dyck: tuple[int, ...]
    # t -> (откуда, куда) для отмеченных шагов
    marked: dict[int, tuple[int, int]]
    # вершина -> моменты отмеченных прибытий; у корня немое прибытие в t = 0
    arrivals: dict[int, list[int]]
    exits: Counter[int]


def _mark_steps(walk: CanonicalWalk) -> _MarkedSteps:
    current: Counter[Pair] = Counter()
    dyck: list[int] = []
    marked: dict[int, tuple[int, int]] = {}
    arrivals: dict[int, list[int]] = defaultdict(list)
    arrivals[ROOT].append(0)
    exits: Counter[int] = Counter()
    for t, (a, b) in enumerate(walk.steps(), start=1):
        pair = _pair(a, b)
        current[pair] += 1
        if current[pair] % 2:
            dyck.append(1)
            marked[t] = (a, b)
            arrivals[b].append(t)
            exits[a] += 1
        else:
            dyck.append(-1)
    return _MarkedSteps(tuple(dyck), marked, dict(arrivals), exits)


def _colour_map(walk: CanonicalWalk, steps: _MarkedSteps) -> dict[int, VertexColor]:
    first_marked: dict[Pair, int] = {}
    for t, (a, b) in steps.marked.items():
        first_marked.setdefault(_pair(a, b), t)

    colors: dict[int, VertexColor] = {}
    for vertex in range(1, walk.vertex_count + 1):
        times = steps.arrivals.get(vertex, [])
        if len(times) < 2:
            colors[vertex] = VertexColor.NONE
            continue
        second = times[1]
        gamma, _ = steps.marked[second]
        if vertex != ROOT:
            base_origin, _ = steps.marked[times[0]]
            if base_origin == gamma:
                colors[vertex] = VertexColor.GREEN_P
                continue
        minimal = first_marked[_pair(gamma, vertex)]
        if minimal == second:
            colors[vertex] = VertexColor.BLUE_R
            continue
        origin, target = steps.marked[minimal]
        if target != gamma:
            _logger.warning(
                "Неоднозначная раскраска: walk=%s vertex=%s minimal_edge=%s",
                walk,
                vertex,
                (origin, target),
            )
            colors[vertex] = VertexColor.BLUE_R
            continue
        position = steps.arrivals[gamma].index(minimal) + 1
        colors[vertex] = VertexColor.RED_Q if position <= 2 else VertexColor.BLUE_R
        if vertex == ROOT:
            _logger.debug(
                "Цвет корня по второму прибытию: walk=%s color=%s",
                walk,
                colors[vertex].value,
            )
    return colors


def classify(walk: CanonicalWalk) -> WalkClassification:
    """
    Классифицировать канонический путь.

    Шаг отмечен, если после него текущая кратность пары нечётна; отмеченные
    шаги дают путь Дика. Древесность определяется по скелету: граф пар,
    пройденных путём, должен быть деревом.
    """
    multiplicities = walk.multiplicities()
    steps = _mark_steps(walk)

    skeleton = nx.Graph()
    skeleton.add_nodes_from(range(1, walk.vertex_count + 1))
    skeleton.add_edges_from(multiplicities)
    is_even = all(count % 2 == 0 for count in multiplicities.values())

    four_edges = [pair for pair, count in multiplicities.items() if count == 4]
    endpoints = [v for pair in four_edges for v in pair]

    kappa = {
        vertex: len(steps.arrivals.get(vertex, []))
        for vertex in range(1, walk.vertex_count + 1)
    }
    colors = _colour_map(walk, steps) if is_even else {}

    return WalkClassification(
        edge_multiplicities=MappingProxyType(dict(multiplicities)),
        dyck=steps.dyck,
        kappa=MappingProxyType(kappa),
        is_even=is_even,
        is_tree_type=nx.is_tree(skeleton),
        four_edge_count=len(four_edges),
        four_edges_disjoint=len(set(endpoints)) == len(endpoints),
        colors=MappingProxyType(colors),
        max_exit_degree=max(steps.exits.values(), default=0),
    )


def color_vertices(walk: CanonicalWalk) -> dict[int, VertexColor]:
    """
    Раскрасить вершины чётного пути.

    Для вершины β с κ(β) >= 2 рассматривается ребро второго отмеченного
    прибытия e = (γ, β). Если оно совпадает по паре с базовым ребром β,
    вершина зелёная (p). Иначе, если e является первым отмеченным ребром
    пары {γ, β}, вершина синяя (r). Иначе первое ребро пары имеет вид
    (β, γ); если это первое или второе отмеченное прибытие в γ, вершина
    красная (q), иначе синяя. У корня первое прибытие немое (t = 0), и он
    не бывает зелёным.

    Raises:
        ContractViolationError: Если путь не чётный
    """
    if any(count % 2 for count in walk.multiplicities().values()):
        raise ContractViolationError("color_vertices", f"путь {walk} не чётный")
    return _colour_map(walk, _mark_steps(walk))


# Фильтры частичных путей


def tree_only(letters: Letters) -> bool:
    """Отсекает шаг в уже посещённую вершину по новой паре (цикл в скелете)."""
    a, b = letters[-2], letters[-1]
    if b not in letters[:-1]:
        return True
    pair = _pair(a, b)
    return any(_pair(x, y) == pair for x, y in zip(letters[:-2], letters[1:-1]))


def max_multiplicity(limit: int) -> WalkFilter:
    """Фильтр: ни одна пара не пройдена больше ``limit`` раз."""

    def predicate(letters: Letters) -> bool:
        pair = _pair(letters[-2], letters[-1])
        count = sum(1 for x, y in zip(letters, letters[1:]) if _pair(x, y) == pair)
        return count <= limit

    return predicate


def all_of(*filters: WalkFilter) -> WalkFilter:
    return lambda letters: all(f(letters) for f in filters)


WALK_FILTERS: dict[str, WalkFilter | None] = {
    "even": None,
    "tree": tree_only,
    "catalan": all_of(tree_only, max_multiplicity(2)),
    "24": all_of(tree_only, max_multiplicity(4)),
}


def enum_limit(s_enum_max: int | None = None) -> int:
    """Верхняя граница перечисления: аргумент или настройка ``s_enum_max``."""
    limit = (
        SettingsLoader().get_int("s_enum_max") if s_enum_max is None else s_enum_max
    )
    if limit > DEFAULT_S_ENUM_MAX:
        _logger.warning(
            "Перечисление до s=%d выше значения по умолчанию %d может быть долгим",
            limit,
            DEFAULT_S_ENUM_MAX,
        )
    return limit


def _check_s(s: int, s_enum_max: int | None, minimum: int = 1) -> None:
    validate_int("s", s, minimum=minimum, maximum=enum_limit(s_enum_max))


def _state_from_prefix(prefix: Letters) -> tuple[dict[Pair, int], int, int]:
    multiplicities: dict[Pair, int] = {}
    for a, b in zip(prefix, prefix[1:]):
        pair = _pair(a, b)
        multiplicities[pair] = multiplicities.get(pair, 0) + 1
    odd = sum(1 for count in multiplicities.values() if count % 2)
    return multiplicities, odd, max(prefix)


def _extend(
    s: int,
    letters: list[int],
    multiplicities: dict[Pair, int],
    odd: int,
    vertices: int,
    predicate: WalkFilter | None,
    stop: int,
) -> Iterator[tuple[list[int], dict[Pair, int], int]]:
    done = len(letters) - 1
    if done == stop:
        yield letters, multiplicities, vertices
        return
    remaining = 2 * s - done
    current = letters[-1]
    for nxt in range(1, vertices + 2):
        if nxt == current:
            continue
        if nxt > vertices and vertices == s + 1:
            continue
        pair = _pair(current, nxt)
        count = multiplicities.get(pair, 0) + 1
        new_odd = odd + 1 if count % 2 else odd - 1
        if new_odd > remaining - 1:
            continue
        letters.append(nxt)
        multiplicities[pair] = count
        if predicate is None or predicate(tuple(letters)):
            yield from _extend(
                s,
                letters,
                multiplicities,
                new_odd,
                max(vertices, nxt),
                predicate,
                stop,
            )
        letters.pop()
        if count == 1:
            del multiplicities[pair]
        else:
            multiplicities[pair] = count - 1


def _walk_states(
    s: int,
    prefix: Letters = (ROOT,),
    predicate: WalkFilter | None = None,
    stop: int | None = None,
) -> Iterator[tuple[list[int], dict[Pair, int], int]]:
    multiplicities, odd, vertices = _state_from_prefix(prefix)
    yield from _extend(
        s,
        list(prefix),
        multiplicities,
        odd,
        vertices,
        predicate,
        2 * s if stop is None else stop,
    )


def enumerate_walks(
    s: int,
    walk_filter: WalkFilter | None = None,
    s_enum_max: int | None = None,
) -> Iterator[CanonicalWalk]:
    """
    Все канонические чётные пути без петель длины 2s в лексикографическом порядке.

    Ветви отсекаются, когда пар с нечётной кратностью больше, чем осталось
    шагов, и когда вершин становится больше s+1. Фильтр получает кортеж
    меток частичного пути после каждого шага.

    Raises:
        ConfigurationError: Если s вне диапазона 1..s_enum_max
    """
    _check_s(s, s_enum_max)
    for letters, _, _ in _walk_states(s, predicate=walk_filter):
        yield CanonicalWalk(letters)


class WalkProfile(NamedTuple):
    """Всё, что нужно знать о пути для весов и подсчётов."""

    vertex_count: int
    half_multiplicities: tuple[int, ...]
    tree_type: bool
    four_edges_disjoint: bool
    root_star: bool


def _profile_of(multiplicities: Mapping[Pair, int], vertices: int) -> WalkProfile:
    four_edges = [pair for pair, count in multiplicities.items() if count == 4]
    endpoints = {v for pair in four_edges for v in pair}
    return WalkProfile(
        vertex_count=vertices,
        half_multiplicities=tuple(
            sorted((count // 2 for count in multiplicities.values()), reverse=True)
        ),
        tree_type=len(multiplicities) == vertices - 1,
        four_edges_disjoint=len(endpoints) == 2 * len(four_edges),
        root_star=all(ROOT in pair for pair in multiplicities),
    )


def profile_of_walk(walk: CanonicalWalk) -> WalkProfile:
    return _profile_of(walk.multiplicities(), walk.vertex_count)


def _profiles_from_prefix(s: int, prefix: Letters) -> Counter[WalkProfile]:
    table: Counter[WalkProfile] = Counter()
    for _, multiplicities, vertices in _walk_states(s, prefix):
        table[_profile_of(multiplicities, vertices)] += 1
    return table


_profile_cache: dict[int, Mapping[WalkProfile, int]] = {}
_profile_lock = threading.Lock()

# Глубина разбиения перебора на независимые задачи
_PREFIX_DEPTH = 3


def profile_table(
    s: int, workers: int = 1, s_enum_max: int | None = None
) -> Mapping[WalkProfile, int]:
    """
    Свернуть перечисление путей длины 2s в таблицу профиль -> число путей.

    При ``workers > 1`` перебор делится по префиксам первых шагов между
    процессами; суммирование счётчиков коммутативно, поэтому результат не
    зависит от разбиения. Таблица кэшируется по s.
    """
    _check_s(s, s_enum_max)
    with _profile_lock:
        cached = _profile_cache.get(s)
    if cached is not None:
        return cached

    if workers > 1 and s >= 2:
        prefixes = [
            tuple(letters)
            for letters, _, _ in _walk_states(s, stop=min(_PREFIX_DEPTH, 2 * s))
        ]
        table: Counter[WalkProfile] = Counter()
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(
                _profiles_from_prefix, [s] * len(prefixes), prefixes
            ):
                table.update(part)
    else:
        table = _profiles_from_prefix(s, (ROOT,))

    _logger.info(
        "Таблица профилей: s=%d walks=%d profiles=%d",
        s,
        sum(table.values()),
        len(table),
    )
    frozen = MappingProxyType(dict(sorted(table.items())))
    with _profile_lock:
        _profile_cache.setdefault(s, frozen)
    return frozen


# Веса и точные моменты


@dataclass(frozen=True)
class WeightMonomial:
    """Мономиальный вес пути: полукратности рёбер и число вершин."""

    half_multiplicities: tuple[int, ...]
    vertex_count: int

    @classmethod
    def from_walk(cls, walk: CanonicalWalk) -> WeightMonomial:
        profile = profile_of_walk(walk)
        return cls(profile.half_multiplicities, profile.vertex_count)

    def pi(self, params: MomentParams) -> Fraction:
        """Произведение V_{2k}/ρ^{k-1} по рёбрам (без множителя 1/n)."""
        value = Fraction(1)
        for k in self.half_multiplicities:
            value *= params.moment(k) / params.rho ** (k - 1)
        return value

    def weight(self, params: MomentParams) -> Fraction:
        """Вес класса: Π V_{2k}/(ρ^{k-1}·n) по рёбрам скелета."""
        return self.pi(params) / Fraction(params.n) ** len(self.half_multiplicities)

    def class_total(self, params: MomentParams) -> Fraction:
        """Вклад класса эквивалентности: n(n-1)...(n-|V|+1) · вес."""
        size = falling_factorial(params.n, self.vertex_count)
        return size * self.weight(params) if size else Fraction(0)


def weight_monomial(walk: CanonicalWalk, params: MomentParams) -> Fraction:
    """
    Вес чётного пути: Π по рёбрам скелета V_{2k}·ρ^{-(k-1)}·n^{-1}.

    Raises:
        ContractViolationError: Если путь не чётный
        ConfigurationError: Если не задан нужный момент
    """
    if any(count % 2 for count in walk.multiplicities().values()):
        raise ContractViolationError("weight_monomial", f"путь {walk} не чётный")
    return WeightMonomial.from_walk(walk).weight(params)


def _monomial(profile: WalkProfile) -> WeightMonomial:
    return WeightMonomial(profile.half_multiplicities, profile.vertex_count)


def exact_moment(
    params: MomentParams, s: int, s_enum_max: int | None = None
) -> Fraction:
    """
    Точный момент M_{2s} = E Tr H^{2s} при конечных n и ρ.

    Сумма по классам чётных путей: убывающий факториал n по числу вершин,
    умноженный на вес пути.
    """
    _check_s(s, s_enum_max, minimum=0)
    if s == 0:
        return Fraction(params.n)
    return sum(
        (
            count * _monomial(p).class_total(params)
            for p, count in profile_table(s, s_enum_max=s_enum_max).items()
        ),
        Fraction(0),
    )


def decompose_moment(
    params: MomentParams, s: int, s_enum_max: int | None = None
) -> tuple[Fraction, Fraction]:
    """Разложить момент на вклады древесных и недревесных путей."""
    _check_s(s, s_enum_max)
    tree_part = Fraction(0)
    non_tree_part = Fraction(0)
    for profile, count in profile_table(s, s_enum_max=s_enum_max).items():
        contribution = count * _monomial(profile).class_total(params)
        if profile.tree_type:
            tree_part += contribution
        else:
            non_tree_part += contribution
    return tree_part, non_tree_part


def wigner_moment(
    n: int, moments: tuple[Fraction, ...], s: int, s_enum_max: int | None = None
) -> Fraction:
    """Точный момент неразреженной матрицы Вигнера с элементами a_ij/√n."""
    _check_s(s, s_enum_max)
    total = Fraction(0)
    for profile, count in profile_table(s, s_enum_max=s_enum_max).items():
        weight = Fraction(falling_factorial(n, profile.vertex_count))
        for k in profile.half_multiplicities:
            if k > len(moments):
                raise ConfigurationError("moments", f"нужен момент V{2 * k}")
            weight *= moments[k - 1] / Fraction(n) ** k
        total += count * weight
    return total


def _is_24star(profile: WalkProfile) -> bool:
    return (
        profile.tree_type
        and all(k <= 2 for k in profile.half_multiplicities)
        and profile.four_edges_disjoint
    )


def count_24star(s: int, s_enum_max: int | None = None) -> UPolynomial:
    """
    Многочлен от u: коэффициент при u^p равен числу древесных (2,4*)-путей
    длины 2s ровно с p рёбрами кратности 4.
    """
    _check_s(s, s_enum_max, minimum=0)
    if s == 0:
        return UPolynomial.constant(1)
    coefficients: Counter[int] = Counter()
    for profile, count in profile_table(s, s_enum_max=s_enum_max).items():
        if _is_24star(profile):
            coefficients[profile.half_multiplicities.count(2)] += count
    size = max(coefficients, default=-1) + 1
    return UPolynomial(coefficients[p] for p in range(size))


class ProfileKind(str, Enum):
    ONE_EDGE = "one-edge"
    TWO_FOUR_SHARED = "two-4-shared"
    TWO_FOUR_ANY = "two-4-any"


@dataclass(frozen=True)
class ProfileDescriptor:
    """Описание профиля кратностей древесного пути.

    ``one-edge:<m>``: одно ребро кратности 2m, остальные кратности 2;
    ``two-4-shared``: два ребра кратности 4 с общей вершиной;
    ``two-4-any``: два ребра кратности 4 без условия на смежность.
    """

    kind: ProfileKind
    m: int = 2

    @classmethod
    def parse(cls, text: str) -> ProfileDescriptor:
        name, _, argument = text.strip().partition(":")
        try:
            kind = ProfileKind(name)
        except ValueError as e:
            raise ConfigurationError("profile", f"неизвестный профиль {text!r}") from e
        if kind is ProfileKind.ONE_EDGE:
            try:
                m = int(argument) if argument else 2
            except ValueError as e:
                raise ConfigurationError("profile", f"некорректное m: {text!r}") from e
            return cls(kind, validate_int("m", m, minimum=1))
        return cls(kind)

    def matches(self, profile: WalkProfile) -> bool:
        return self.marked_edges(profile) > 0

    def marked_edges(self, profile: WalkProfile) -> int:
        """Сколькими способами в пути с данным профилем выбирается отмеченное ребро.

        При ``one-edge:1`` все рёбра имеют кратность 2, и отмеченным может
        быть любое из s рёбер скелета.
        """
        if not profile.tree_type:
            return 0
        halves = profile.half_multiplicities
        if self.kind is ProfileKind.ONE_EDGE:
            if halves[0] != self.m or any(k != 1 for k in halves[1:]):
                return 0
            return len(halves) if self.m == 1 else 1
        if halves[:2] != (2, 2) or any(k != 1 for k in halves[2:]):
            return 0
        if self.kind is ProfileKind.TWO_FOUR_SHARED:
            return int(not profile.four_edges_disjoint)
        return 1

    def __str__(self) -> str:
        if self.kind is ProfileKind.ONE_EDGE:
            return f"{self.kind.value}:{self.m}"
        return self.kind.value


def count_profile(
    s: int, profile: ProfileDescriptor | str, s_enum_max: int | None = None
) -> int:
    """
    Число древесных путей длины 2s с заданным профилем кратностей.

    Для ``one-edge:m`` считаются пути с отмеченным ребром кратности 2m,
    поэтому при m = 1 каждый путь Каталана входит s раз.

    Raises:
        ConfigurationError: Если описание профиля неизвестно
    """
    if isinstance(profile, str):
        profile = ProfileDescriptor.parse(profile)
    if not isinstance(profile, ProfileDescriptor):
        raise ConfigurationError("profile", f"неизвестный профиль {profile!r}")
    _check_s(s, s_enum_max)
    return sum(
        count * profile.marked_edges(p)
        for p, count in profile_table(s, s_enum_max=s_enum_max).items()
    )


def rose_monomials(m: int, s_enum_max: int | None = None) -> Counter[tuple[int, ...]]:
    """Полукратности «роз» длины 2m с числом путей.

    У «розы» все рёбра выходят из корня и имеют кратность не меньше 4.
    """
    _check_s(m, s_enum_max)
    monomials: Counter[tuple[int, ...]] = Counter()
    for profile, count in profile_table(m, s_enum_max=s_enum_max).items():
        if profile.root_star and min(profile.half_multiplicities) >= 2:
            monomials[profile.half_multiplicities] += count
    return monomials


def rose_weight_sum(
    m: int,
    params: MomentParams,
    leading_only: bool = False,
    s_enum_max: int | None = None,
) -> Fraction:
    """
    Сумма весов π(W) = Π V_{2k}/ρ^{k-1} по «розам» длины 2m.

    При ``leading_only`` остаются только мономы низшего порядка по 1/ρ,
    то есть розы с наибольшим числом лепестков.
    """
    monomials = rose_monomials(m, s_enum_max)
    if leading_only and monomials:
        lowest = min(sum(k - 1 for k in halves) for halves in monomials)
        monomials = Counter(
            {
                halves: count
                for halves, count in monomials.items()
                if sum(k - 1 for k in halves) == lowest
            }
        )
    total = Fraction(0)
    for halves, count in monomials.items():
        total += count * WeightMonomial(halves, len(halves) + 1).pi(params)
    return total


def verify_red_blue_pairing(s: int, s_enum_max: int | None = None) -> CheckReport:
    """
    Проверить на всех чётных путях длины 2s: красная q-вершина
    встречается только вместе с синей r-вершиной.

    Правила раскраски применяются буквально, и уже при s = 5 они дают
    пути с красной вершиной без синей (например ``1,2,1,2,1,3,2,1,2,3,1``:
    вершина 2 зелёная, корень красный, а третье прибытие в 2 по ребру
    цикла не раскрашивается). Поэтому отчёт диагностический: контрпримеры
    перечисляются дословно и пишутся в лог, но на код выхода не влияют.
    В связанном отчёте сравниваются два признака древесности: ацикличность
    скелета и отсутствие синих вершин.
    """
    _check_s(s, s_enum_max)
    report = CheckReport("red q-vertex implies blue r-vertex", CheckKind.DIAGNOSTIC)
    agreement = CheckReport("tree-type == no blue r-vertex", CheckKind.DIAGNOSTIC)
    checked = 0
    mismatches = 0
    counterexamples: list[str] = []
    for walk in enumerate_walks(s, s_enum_max=s_enum_max):
        classification = classify(walk)
        checked += 1
        if classification.has_red and not classification.has_blue:
            counterexamples.append(str(walk))
            report.add(str(walk), "red without blue", "blue present", False)
        if classification.is_tree_type == classification.has_blue:
            mismatches += 1
            if mismatches <= 20:
                agreement.add(str(walk), classification.has_blue, "no blue", False)
    report.add(
        f"s={s}", f"walks={checked}", "0 counterexamples", not counterexamples
    )
    agreement.add(f"s={s}", f"mismatches={mismatches}", 0, mismatches == 0)
    report.related.append(agreement)
    if counterexamples:
        report.notes.append(
            f"s={s}: красная вершина без синей в {len(counterexamples)} путях"
        )
        _logger.warning(
            "Красная вершина без синей: s=%d count=%d first=%s",
            s,
            len(counterexamples),
            counterexamples[0],
        )
    _logger.info("Проверка раскраски: s=%d walks=%d", s, checked)
    return report
