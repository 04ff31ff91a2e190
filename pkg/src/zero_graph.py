"""Minimal zeros graph, its maximal cliques and the representation of the zero set."""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterable
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

from app_configs import CLIQUE_ORACLE_MAX_VERTICES
from src.exceptions import InvalidArgumentError, ResourceLimitError
from src.minimal_zeros import MinimalZero
from src.model_data import SupportSet, SymMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExtendedSupportPair:
    """``(supp(τ(j)), M(j))`` with ``M(j) = {k : (Xτ(j))_k = 0}``."""

    j: int
    support: SupportSet
    M: SupportSet


@dataclass(frozen=True)
class ZerosGraph:
    """Undirected graph on ``J = {1..n}``; edges are stored as ``(i, j)`` with ``i < j``."""

    n: int
    edges: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        for i, j in self.edges:
            if not 1 <= i < j <= self.n:
                raise InvalidArgumentError(f"edge ({i},{j}) is not a pair i<j within 1..{self.n}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> ZerosGraph:
        return cls(n, frozenset((min(i, j), max(i, j)) for i, j in edges))

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    @cached_property
    def adjacency(self) -> dict[int, frozenset[int]]:
        neighbors = {v: set() for v in self.vertices}
        for i, j in self.edges:
            neighbors[i].add(j)
            neighbors[j].add(i)
        return {v: frozenset(ns) for v, ns in neighbors.items()}

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


@dataclass(frozen=True, order=True)
class Clique:
    """A vertex subset of a :class:`ZerosGraph`, members ascending."""

    members: tuple[int, ...]

    @classmethod
    def of(cls, members: Iterable[int]) -> Clique:
        return cls(tuple(sorted(members)))

    def sort_key(self) -> tuple:
        """Larger cliques first, then lexicographic member order."""
        return -len(self.members), self.members

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, j: int) -> bool:
        return j in self.members

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.members)) + "}"


@dataclass(frozen=True)
class RepresentationComponent:
    """``T₀(s) = conv{τ(j), j ∈ J(s)}`` with ``P*(s)`` the union of the member supports."""

    s: int
    clique: Clique
    p_star: SupportSet
    vertices: tuple[MinimalZero, ...]


@dataclass
class Representation:
    """``T₀`` as the union of its components; ``errors`` lists failed invariants."""

    components: list[RepresentationComponent] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def component(self, s: int) -> RepresentationComponent:
        if not 1 <= s <= len(self.components):
            raise InvalidArgumentError(f"component {s} outside 1..{len(self.components)}")
        return self.components[s - 1]

    @property
    def is_valid(self) -> bool:
        return not self.errors


@dataclass
class CliqueConditionsReport:
    """Outcome of the three conditions that characterise the representation.

    Attributes:
        coverage: every ``j ∈ J`` lies in some ``J(s)``
        uncovered: the vertices missing from every clique
        pstar_in_M: ``P*(s) ⊆ M(j)`` for all ``j ∈ J(s)``
        pstar_failures: ``(s, j)`` pairs violating it
        separation: every pair of components is separated by some member
        counterexample: ``(s, s̄, i₀)`` of the first separation failure; ``i₀`` is None when
            ``J(s) \\ J(s̄)`` or ``J(s̄) \\ J(s)`` is empty
    """

    coverage: bool = True
    uncovered: list[int] = field(default_factory=list)
    pstar_in_M: bool = True
    pstar_failures: list[tuple[int, int]] = field(default_factory=list)
    separation: bool = True
    counterexample: Optional[tuple[int, int, Optional[int]]] = None

    @property
    def passed(self) -> bool:
        return self.coverage and self.pstar_in_M and self.separation


def compute_M(matrix: SymMatrix, zero: MinimalZero) -> SupportSet:
    """``M(j)``: the indices where ``Xτ(j)`` vanishes."""
    return SupportSet.of_vector(matrix.matvec(zero.tau), matrix.is_zero)


def extended_support_set(matrix: SymMatrix, zeros: list[MinimalZero]) -> list[ExtendedSupportPair]:
    return [ExtendedSupportPair(zero.index, zero.support, compute_M(matrix, zero)) for zero in zeros]


def build_graph(pairs: list[ExtendedSupportPair]) -> ZerosGraph:
    """Edge ``(i, j)``, ``i < j``, iff ``supp(τ(i)) ⊆ M(j)``."""
    edges = {
        (a.j, b.j)
        for a, b in itertools.combinations(sorted(pairs, key=lambda pair: pair.j), 2)
        if a.support.issubset(b.M)
    }
    return ZerosGraph(len(pairs), frozenset(edges))


def build_graph_quadratic(matrix: SymMatrix, zeros: list[MinimalZero]) -> ZerosGraph:
    """Edge ``(i, j)``, ``i < j``, iff ``τ(i)ᵀXτ(j) = 0``."""
    edges = {
        (a.index, b.index)
        for a, b in itertools.combinations(zeros, 2)
        if matrix.is_zero(matrix.quadratic_form(a.tau, b.tau))
    }
    return ZerosGraph(len(zeros), frozenset(edges))


def degeneracy_ordering(graph: ZerosGraph) -> list[int]:
    """Repeatedly removes a vertex of minimum remaining degree (smallest index on ties)."""
    degree = {v: len(graph.adjacency[v]) for v in graph.vertices}
    left = set(graph.vertices)
    order = []
    while left:
        v = min(left, key=lambda u: (degree[u], u))
        order.append(v)
        left.remove(v)
        for u in graph.adjacency[v] & left:
            degree[u] -= 1
    return order


def _expand(graph: ZerosGraph, clique: set[int], candidates: set[int], excluded: set[int], found: list[Clique]) -> None:
    if not candidates and not excluded:
        found.append(Clique.of(clique))
        return
    pivot = min(candidates | excluded, key=lambda u: (-len(candidates & graph.adjacency[u]), u))
    for v in sorted(candidates - graph.adjacency[pivot]):
        neighbors = graph.adjacency[v]
        _expand(graph, clique | {v}, candidates & neighbors, excluded & neighbors, found)
        candidates = candidates - {v}
        excluded = excluded | {v}


def sort_cliques(cliques: Iterable[Clique]) -> list[Clique]:
    return sorted(cliques, key=Clique.sort_key)


def maximal_cliques(graph: ZerosGraph) -> list[Clique]:
    """All maximal cliques, by pivoting Bron-Kerbosch over a degeneracy ordering.

    Returns:
        list[Clique]: sorted by size descending, then lexicographically; isolated vertices
        come out as singletons
    """
    order = degeneracy_ordering(graph)
    position = {v: k for k, v in enumerate(order)}
    found: list[Clique] = []
    for v in order:
        neighbors = graph.adjacency[v]
        later = {u for u in neighbors if position[u] > position[v]}
        earlier = {u for u in neighbors if position[u] < position[v]}
        _expand(graph, {v}, later, earlier, found)
    logger.debug("%d maximal cliques on %d vertices", len(found), graph.n)
    return sort_cliques(found)


def is_clique(graph: ZerosGraph, members: Iterable[int]) -> bool:
    return all(graph.has_edge(i, j) for i, j in itertools.combinations(members, 2))


def maximal_cliques_bruteforce(graph: ZerosGraph) -> list[Clique]:
    """Maximal cliques from a scan of all vertex subsets.

    Raises:
        ResourceLimitError: if the graph has more than ``CLIQUE_ORACLE_MAX_VERTICES`` vertices
    """
    if graph.n > CLIQUE_ORACLE_MAX_VERTICES:
        raise ResourceLimitError(
            f"clique oracle limited to {CLIQUE_ORACLE_MAX_VERTICES} vertices, got {graph.n}"
        )
    found = []
    for size in range(1, graph.n + 1):
        for members in itertools.combinations(graph.vertices, size):
            if not is_clique(graph, members):
                continue
            outside = (v for v in graph.vertices if v not in members)
            if not any(all(graph.has_edge(v, u) for u in members) for v in outside):
                found.append(Clique(members))
    return sort_cliques(found)


def verify_cliques_maximal(graph: ZerosGraph, cliques: list[Clique]) -> bool:
    """True iff every entry is a clique that no outside vertex extends."""
    for clique in cliques:
        if not is_clique(graph, clique):
            return False
        if any(v not in clique and graph.adjacency[v].issuperset(clique.members) for v in graph.vertices):
            return False
    return True


def build_representation(
    matrix: SymMatrix,
    zeros: list[MinimalZero],
    cliques: list[Clique],
    graph: Optional[ZerosGraph] = None,
) -> Representation:
    """Assembles ``T₀ = ∪ₛ conv{τ(j), j ∈ J(s)}`` from the maximal cliques.

    Components are numbered ``s = 1..|S|`` in the sorted clique order. Failed invariants
    (repeated or non-maximal cliques, non-orthogonal members, comparable ``P*`` sets) are
    collected in ``errors`` rather than raised.
    """
    by_index = {zero.index: zero for zero in zeros}
    representation = Representation()

    for s, clique in enumerate(sort_cliques(cliques), start=1):
        try:
            vertices = tuple(by_index[j] for j in clique)
        except KeyError as err:
            representation.errors.append(f"J({s}) = {clique} names unknown zero {err.args[0]}")
            continue

        p_star = SupportSet(0, matrix.p)
        for zero in vertices:
            p_star = p_star | zero.support
        representation.components.append(RepresentationComponent(s, clique, p_star, vertices))

        for a, b in itertools.combinations(vertices, 2):
            if not matrix.is_zero(matrix.quadratic_form(a.tau, b.tau)):
                representation.errors.append(f"τ({a.index})ᵀXτ({b.index}) ≠ 0 inside J({s})")

    if len(set(cliques)) != len(cliques):
        representation.errors.append("cliques are not distinct")
    if graph is not None and not verify_cliques_maximal(graph, cliques):
        representation.errors.append("some J(s) is not a maximal clique")
    if not verify_pstar_incomparability(representation):
        representation.errors.append("P* sets are not pairwise incomparable")

    for error in representation.errors:
        logger.warning("representation: %s", error)
    return representation


def verify_clique_conditions(pairs: list[ExtendedSupportPair], cliques: list[Clique]) -> CliqueConditionsReport:
    """Checks coverage, ``P*(s) ⊆ M(j)`` and pairwise separation of the components."""
    by_j = {pair.j: pair for pair in pairs}
    cliques = sort_cliques(cliques)
    report = CliqueConditionsReport()

    covered = set().union(*(set(clique) for clique in cliques))
    report.uncovered = sorted(set(by_j) - covered)
    report.coverage = not report.uncovered

    p_star = {}
    for s, clique in enumerate(cliques, start=1):
        width = pairs[0].support.width if pairs else 0
        union = SupportSet(0, width)
        for j in clique:
            union = union | by_j[j].support
        p_star[s] = union
        for j in clique:
            if not union.issubset(by_j[j].M):
                report.pstar_failures.append((s, j))
    report.pstar_in_M = not report.pstar_failures

    for (s, a), (t, b) in itertools.permutations(enumerate(cliques, start=1), 2):
        only_a = [j for j in a if j not in b]
        only_b = [j for j in b if j not in a]
        if not only_a or not only_b:
            report.separation = False
            report.counterexample = (s, t, None)
            break
        stuck = next(
            (i0 for i0 in only_a if all(by_j[i0].support.issubset(by_j[j0].M) for j0 in only_b)),
            None,
        )
        if stuck is not None:
            report.separation = False
            report.counterexample = (s, t, stuck)
            break

    return report


def verify_pstar_incomparability(representation: Representation) -> bool:
    return not any(
        a.p_star.issubset(b.p_star)
        for a, b in itertools.permutations(representation.components, 2)
    )
