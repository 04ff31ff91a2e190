"""Membership, sampling and grid verification for the set ``T₀`` of normalized zeros."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Union

import numpy as np
import scipy.optimize

from app_configs import CLIQUE_EXTENSION_MAX_SIZE
from src.copositivity import check_grid_size, iter_grid_points
from src.exceptions import ContractError, InvalidArgumentError
from src.minimal_zeros import MinimalZero
from src.model_data import SupportSet, SymMatrix, support_of
from src.utils.linalg import integer_scaled, is_positive_semidefinite, principal_submatrix
from src.zero_graph import Representation, ZerosGraph

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

logger = logging.getLogger(__name__)

HULL_TOLERANCE = 1e-7


@dataclass(frozen=True, eq=False)
class SimplexPoint:
    """A point ``t >= 0`` with ``‖t‖₁ = 1``."""

    t: np.ndarray

    @classmethod
    def of(cls, matrix: SymMatrix, values: ArrayLike, normalize: bool = False) -> SimplexPoint:
        """Validates (or, with ``normalize``, rescales) a vector onto the simplex.

        Raises:
            InvalidArgumentError: on a wrong length, a negative component, a zero vector,
                or (without ``normalize``) a sum other than 1
        """
        t = matrix.vector(values)
        if len(t) != matrix.p:
            raise InvalidArgumentError(f"point has {len(t)} components, expected {matrix.p}")
        if any(v < 0 and not matrix.is_zero(v) for v in t):
            raise InvalidArgumentError("point has a negative component")
        total = sum(t)
        if normalize:
            if total <= 0 or matrix.is_zero(total):
                raise InvalidArgumentError("cannot normalize the zero vector")
            t = np.array([v / total for v in t], dtype=t.dtype)
        elif not matrix.is_zero(total - 1):
            raise InvalidArgumentError(f"point components sum to {total}, not 1")
        return cls(t)

    def support(self, matrix: SymMatrix) -> SupportSet:
        return support_of(self.t, matrix)

    def values(self) -> tuple:
        return tuple(self.t.tolist())


def _vector(t: Union[SimplexPoint, ArrayLike]) -> np.ndarray:
    return t.t if isinstance(t, SimplexPoint) else np.asarray(t)


def is_zero(matrix: SymMatrix, t: Union[SimplexPoint, ArrayLike]) -> bool:
    """True iff ``tᵀXt = 0`` under the matrix's zero test."""
    return matrix.is_zero(matrix.quadratic_form(_vector(t)))


def component_membership(representation: Representation, matrix: SymMatrix, t: Union[SimplexPoint, ArrayLike]) -> set[int]:
    """Components ``s`` with ``supp(t) ⊆ P*(s)``, for a zero ``t``; empty for non-zeros.

    For a zero of ``X`` this is exactly the set of components whose polytope contains it.
    """
    t = _vector(t)
    if not is_zero(matrix, t):
        return set()
    support = support_of(t, matrix)
    return {component.s for component in representation if support.issubset(component.p_star)}


def in_convex_hull(points: list[np.ndarray], t: ArrayLike, tolerance: float = HULL_TOLERANCE) -> bool:
    """LP feasibility of ``t = Σ λ_j v_j`` with ``λ >= 0``, ``Σ λ_j = 1``.

    See :func:`scipy.optimize.milp()`; all variables are continuous.
    """
    if not points:
        return False
    vertices = np.array([np.asarray(v, dtype=float) for v in points]).T
    target = np.asarray(t, dtype=float)

    A = np.vstack([vertices, np.ones(len(points))])
    b = np.append(target, 1.0)
    solution = scipy.optimize.milp(
        np.zeros(len(points)),
        integrality=np.zeros(len(points), dtype=np.uint8),
        bounds=scipy.optimize.Bounds(lb=0, ub=np.inf),
        constraints=scipy.optimize.LinearConstraint(A, lb=b - tolerance, ub=b + tolerance),
    )
    if solution.status != 0 or solution.x is None:
        return False
    return bool(np.max(np.abs(A @ solution.x - b)) <= 10 * tolerance)


def hull_membership(representation: Representation, matrix: SymMatrix, t: Union[SimplexPoint, ArrayLike]) -> set[int]:
    """Components whose polytope ``conv{τ(j), j ∈ J(s)}`` contains ``t``."""
    t = _vector(t)
    support = support_of(t, matrix)
    return {
        component.s
        for component in representation
        if support.issubset(component.p_star)
        and in_convex_hull([zero.tau for zero in component.vertices], t)
    }


def sample_component(
    representation: Representation,
    s: int,
    weights: ArrayLike,
    matrix: SymMatrix,
) -> SimplexPoint:
    """The convex combination ``Σ α_j τ(j)`` over ``j ∈ J(s)``, in member order.

    Raises:
        InvalidArgumentError: if the weights are not on the simplex of size ``|J(s)|``
        ContractError: if the result is not a zero (the representation is inconsistent)
    """
    component = representation.component(s)
    alpha = matrix.vector(weights)
    if len(alpha) != len(component.vertices):
        raise InvalidArgumentError(f"{len(alpha)} weights for {len(component.vertices)} vertices of T₀({s})")
    if any(a < 0 and not matrix.is_zero(a) for a in alpha) or not matrix.is_zero(sum(alpha) - 1):
        raise InvalidArgumentError("weights must be nonnegative and sum to 1")

    t = matrix.vector([0] * matrix.p)
    for a, zero in zip(alpha, component.vertices):
        t = t + a * zero.tau
    if not is_zero(matrix, t):
        raise ContractError(f"convex combination in T₀({s}) is not a zero")
    return SimplexPoint(t)


def barycenter(representation: Representation, s: int, matrix: SymMatrix) -> SimplexPoint:
    """``τ*(s)``, the uniform combination of the vertices of component ``s``."""
    size = len(representation.component(s).vertices)
    weight = Fraction(1, size) if matrix.is_exact else 1.0 / size
    return sample_component(representation, s, [weight] * size, matrix)


@dataclass
class OracleReport:
    """Outcome of :func:`oracle_equivalence`.

    Attributes:
        N: grid denominator
        points_checked: grid points visited
        zeros_found: grid points that are zeros
        violations: ``(t, is_zero, hull components)`` where being a zero and lying in some
            component polytope disagree
        support_mismatches: ``(t, hull components, support components)`` for zeros where
            hull membership and the support criterion disagree
    """

    N: int
    points_checked: int = 0
    zeros_found: int = 0
    violations: list[tuple] = field(default_factory=list)
    support_mismatches: list[tuple] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations and not self.support_mismatches


def oracle_equivalence(matrix: SymMatrix, representation: Representation, N: int) -> OracleReport:
    """Checks ``T₀ = ∪ₛ T₀(s)`` on every simplex grid point with denominator ``N``.

    A grid point must be a zero exactly when some component polytope contains it, and for
    zeros the containing components must be those with ``supp(t) ⊆ P*(s)``.

    Raises:
        InvalidArgumentError: if ``N < 1``
        ResourceLimitError: if the grid is larger than ``GRID_POINT_CAP``
    """
    if N < 1:
        raise InvalidArgumentError(f"grid denominator must be at least 1, got {N}")
    check_grid_size(matrix.p, N)
    report = OracleReport(N)

    if matrix.is_exact:
        rows, _ = integer_scaled(matrix.entries)
        weights = np.array(rows, dtype=object)
    else:
        weights = matrix.to_float()

    p_stars = [component.p_star.bits for component in representation]

    for counts in iter_grid_points(matrix.p, N):
        if matrix.is_exact:
            values = (counts.astype(object).dot(weights) * counts).sum(axis=1)
            zero_flags = [v == 0 for v in values]
        else:
            values = (counts.dot(weights) * counts).sum(axis=1) / (N * N)
            zero_flags = [matrix.is_zero(v) for v in values]

        for m, zero in zip(counts, zero_flags):
            report.points_checked += 1
            bits = sum(1 << q for q in np.flatnonzero(m))
            candidate = any(bits & ~star == 0 for star in p_stars)
            if not zero and not candidate:
                continue

            if matrix.is_exact:
                t = np.empty(matrix.p, dtype=object)
                t[:] = [Fraction(int(c), N) for c in m]
            else:
                t = m.astype(float) / N
            point = tuple(t.tolist())

            hull = hull_membership(representation, matrix, t) if candidate else set()
            if zero:
                report.zeros_found += 1
            if zero != bool(hull):
                report.violations.append((point, zero, sorted(hull)))
            elif zero:
                by_support = component_membership(representation, matrix, t)
                if by_support != hull:
                    report.support_mismatches.append((point, sorted(hull), sorted(by_support)))

    logger.info(
        "grid oracle N=%d: %d points, %d zeros, %d violations",
        N,
        report.points_checked,
        report.zeros_found,
        len(report.violations) + len(report.support_mismatches),
    )
    return report


def verify_full_support_exclusivity(matrix: SymMatrix, representation: Representation) -> bool:
    """A zero with support ``P*(s̄)`` lies in ``T₀(s̄)`` and in no other component.

    Checked on the barycenters, whose support is exactly ``P*(s)``.
    """
    for component in representation:
        center = barycenter(representation, component.s, matrix)
        if center.support(matrix) != component.p_star:
            return False
        if component_membership(representation, matrix, center) != {component.s}:
            return False
    return True


def verify_clique_extension(representation: Representation, graph: ZerosGraph) -> bool:
    """For every clique ``J̄`` (up to ``CLIQUE_EXTENSION_MAX_SIZE`` members) whose supports
    cover some ``P*(s)``: the union equals ``P*(s)``, ``J̄ ⊆ J(s)``, and ``J̄ ⊄ J(s̄)`` for
    every other component.
    """
    supports = {zero.index: zero.support for component in representation for zero in component.vertices}
    cliques = set()
    for component in representation:
        for size in range(1, min(len(component.clique), CLIQUE_EXTENSION_MAX_SIZE) + 1):
            cliques.update(itertools.combinations(component.clique.members, size))

    for members in sorted(cliques):
        union = None
        for j in members:
            union = supports[j] if union is None else union | supports[j]
        for component in representation:
            if not component.p_star.issubset(union):
                continue
            if union != component.p_star or not set(members) <= set(component.clique):
                return False
            if any(
                set(members) <= set(other.clique) for other in representation if other.s != component.s
            ):
                return False
    return True


def verify_vertex_identification(representation: Representation, zeros: list[MinimalZero]) -> bool:
    """Every ``τ(j)`` is a vertex of some component, and no component vertex lies in the hull
    of the other vertices of that component.
    """
    seen = set()
    known = {zero.index for zero in zeros}
    for component in representation:
        for zero in component.vertices:
            if zero.index not in known:
                return False
            seen.add(zero.index)
            others = [other.tau for other in component.vertices if other.index != zero.index]
            if in_convex_hull(others, zero.tau):
                logger.warning("τ(%d) is not a vertex of T₀(%d)", zero.index, component.s)
                return False
    return seen == known


def verify_component_psd(matrix: SymMatrix, representation: Representation) -> bool:
    """``X(P*(s))`` is positive semidefinite for every component."""
    return all(
        is_positive_semidefinite(principal_submatrix(matrix, component.p_star))
        for component in representation
    )
