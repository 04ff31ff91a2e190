"""Enumeration of the normalized minimal zeros of a copositive matrix.

A support ``P̄`` carries a minimal zero iff ``X(P̄)`` has corank one (condition A) and its
kernel is spanned by a strictly positive vector (condition B). Condition B is tested by
fixing a pivot ``i*`` and solving the remaining rows for the other components.
"""

from __future__ import annotations

import dataclasses
import itertools
import logging
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from app_configs import UNPRUNED_SCAN_MAX_DIMENSION
from src.copositivity import CopositivityVerdict
from src.exceptions import ContractError, ResourceLimitError
from src.model_data import SupportSet, SymMatrix
from src.utils.linalg import (
    is_positive_semidefinite,
    is_singular,
    kernel_basis,
    principal_submatrix,
    rank,
    solve,
)

logger = logging.getLogger(__name__)


class CopositivityStatus(Enum):
    VERIFIED = "verified copositive"
    REFUTED = "not copositive"
    UNVERIFIED = "input not verified copositive"


@dataclass(frozen=True, eq=False)
class ConditionBResult:
    """Outcome of the condition (B) test on one support.

    Attributes:
        holds: whether ``X(P̄)`` has a strictly positive kernel vector
        kernel_vector: that vector restricted to ``P̄`` (ascending index order), ``‖·‖₁ = 1``
        pivot: the index ``i*`` used
        borderline: float-mode notes on components within a decade of ``positivity_eps``
    """

    holds: bool
    kernel_vector: Optional[np.ndarray] = None
    pivot: Optional[int] = None
    borderline: tuple[str, ...] = ()


@dataclass(frozen=True, eq=False)
class MinimalZero:
    """A normalized minimal zero ``τ(j)`` and its support."""

    index: int
    tau: np.ndarray
    support: SupportSet

    def values(self) -> tuple:
        return tuple(self.tau.tolist())

    def __eq__(self, other) -> bool:
        if not isinstance(other, MinimalZero):
            return NotImplemented
        return self.index == other.index and self.support == other.support and self.values() == other.values()

    def __hash__(self):
        return hash((self.index, self.support))


def check_condition_A(matrix: SymMatrix, support: SupportSet) -> bool:
    """True iff ``rank(X(P̄)) = |P̄| - 1``."""
    return rank(principal_submatrix(matrix, support)) == len(support) - 1


def _condition_b(matrix: SymMatrix, support: SupportSet, pivot: int) -> ConditionBResult:
    rest = support.without(pivot)
    block = principal_submatrix(matrix, rest)
    if is_singular(block):
        # a singular X(P̄ \ i*) rules the support out
        return ConditionBResult(False, pivot=pivot)

    column = matrix.entries[rest.positions(), pivot - 1]
    y = -solve(block, column)

    notes = ()
    if matrix.is_exact:
        holds = all(v > 0 for v in y)
    else:
        eps = matrix.policy.positivity_eps
        holds = bool(np.all(y > eps))
        close = [k for k, v in zip(rest.indices(), y) if eps / 10 < v <= eps]
        if close:
            notes = (
                f"condition B on {support}: components {close} of y within "
                f"(positivity_eps/10, positivity_eps]",
            )
            warnings.warn(notes[0], RuntimeWarning, stacklevel=3)

    if not holds:
        return ConditionBResult(False, pivot=pivot, borderline=notes)

    beta = 1 + sum(y)
    kernel = list(y)
    kernel.insert(support.indices().index(pivot), type(beta)(1))
    vector = np.array([v / beta for v in kernel], dtype=object if matrix.is_exact else float)
    return ConditionBResult(True, vector, pivot, notes)


def check_condition_B(matrix: SymMatrix, support: SupportSet, pivot: Optional[int] = None) -> ConditionBResult:
    """Tests whether ``X(P̄)`` has a strictly positive kernel vector.

    Args:
        matrix: the matrix
        support: ``P̄``, with ``|P̄| >= 2`` and condition (A) holding
        pivot: the index ``i*`` (defaults to the smallest index of ``P̄``)

    Returns:
        ConditionBResult: with the normalized kernel vector ``(y, 1)/(1 + ‖y‖₁)`` on success,
        where ``y = -X(P̄ \\ i*)⁻¹ · (X_{k,i*})``

    Raises:
        ContractError: if ``|P̄| < 2``, condition (A) fails or ``pivot`` is not in ``P̄``
    """
    if len(support) < 2:
        raise ContractError(f"condition B needs at least two indices, got {support}")
    if not check_condition_A(matrix, support):
        raise ContractError(f"condition A fails on {support}")
    if pivot is None:
        pivot = support.smallest()
    elif pivot not in support:
        raise ContractError(f"pivot {pivot} is not in {support}")
    return _condition_b(matrix, support, pivot)


def build_minimal_zero(matrix: SymMatrix, support: SupportSet, result: ConditionBResult, index: int = 0) -> MinimalZero:
    """Extends the kernel vector of a successful (B) test by zeros to a p-vector.

    Raises:
        ContractError: if the test did not hold
    """
    if not result.holds:
        raise ContractError(f"no positive kernel vector on {support}")
    tau = matrix.vector([0] * matrix.p)
    tau[support.positions()] = result.kernel_vector
    return MinimalZero(index, tau, support)


def unit_zero(matrix: SymMatrix, k: int, index: int = 0) -> MinimalZero:
    """``e_k``, the minimal zero of a zero diagonal entry."""
    tau = matrix.vector([int(q == k) for q in range(1, matrix.p + 1)])
    return MinimalZero(index, tau, SupportSet.from_indices([k], matrix.p))


class MinimalZeroSearch:
    """Step-wise enumeration of all normalized minimal zeros.

    Step 1 takes every zero diagonal entry and removes its index from ``P``. Step ``k``
    tests every ``k``-subset of the remaining indices that contains no accepted support.

    Args:
        matrix: the matrix, assumed copositive
        copositivity: verdict of the copositivity gate, if it was run
    """

    def __init__(self, matrix: SymMatrix, copositivity: Optional[CopositivityVerdict] = None):
        self.matrix = matrix
        self.copositivity = copositivity
        self._accepted: list[SupportSet] = []
        self._zeros: list[MinimalZero] = []
        self._remaining: list[int] = list(range(1, matrix.p + 1))
        self.tested = 0
        self.pruned = 0
        self.warnings: list[str] = []

    @property
    def status(self) -> CopositivityStatus:
        if self.copositivity is None:
            return CopositivityStatus.UNVERIFIED
        if self.copositivity.is_copositive:
            return CopositivityStatus.VERIFIED
        return CopositivityStatus.REFUTED

    @property
    def remaining(self) -> list[int]:
        """Indices left after Step 1."""
        return list(self._remaining)

    def step_one(self) -> list[MinimalZero]:
        found = [
            unit_zero(self.matrix, k)
            for k in self._remaining
            if self.matrix.is_zero(self.matrix.entries[k - 1, k - 1])
        ]
        for zero in found:
            self._remaining.remove(zero.support.smallest())
        self._accept(found)
        logger.debug("step 1: %d zero diagonal entries", len(found))
        return found

    def step_k(self, k: int) -> list[MinimalZero]:
        found = []
        for indices in itertools.combinations(self._remaining, k):
            candidate = SupportSet.from_indices(indices, self.matrix.p)
            if any(support.issubset(candidate) for support in self._accepted):
                self.pruned += 1
                continue
            self.tested += 1
            if not check_condition_A(self.matrix, candidate):
                continue
            result = _condition_b(self.matrix, candidate, candidate.smallest())
            self.warnings.extend(result.borderline)
            if result.holds:
                found.append(build_minimal_zero(self.matrix, candidate, result))
        self._accept(found)
        logger.debug("step %d: %d accepted, %d tested, %d pruned so far", k, len(found), self.tested, self.pruned)
        return found

    def _accept(self, found: list[MinimalZero]) -> None:
        # later steps prune against these
        self._zeros.extend(found)
        self._accepted.extend(zero.support for zero in found)

    def run(self) -> list[MinimalZero]:
        """Runs all steps and returns the zeros indexed ``1..|J|`` in support order."""
        if self.status is not CopositivityStatus.VERIFIED:
            message = f"minimal zeros of an {self.status.value} matrix"
            if self.status is CopositivityStatus.REFUTED:
                warnings.warn(message, RuntimeWarning, stacklevel=2)
            logger.info(message)
            self.warnings.append(message)

        self.step_one()
        for k in range(2, len(self._remaining) + 1):
            self.step_k(k)

        ordered = sorted(self._zeros, key=lambda zero: zero.support.sort_key())
        self._zeros = [dataclasses.replace(zero, index=j) for j, zero in enumerate(ordered, start=1)]
        logger.info("%d minimal zeros (%d subsets tested, %d pruned)", len(self._zeros), self.tested, self.pruned)
        return list(self._zeros)


def enumerate_minimal_zeros(matrix: SymMatrix, copositivity: Optional[CopositivityVerdict] = None) -> list[MinimalZero]:
    """All normalized minimal zeros of ``matrix``, see :class:`MinimalZeroSearch`."""
    return MinimalZeroSearch(matrix, copositivity).run()


def enumerate_minimal_zeros_unpruned(matrix: SymMatrix) -> list[SupportSet]:
    """Supports passing (A)+(B) among all ``2^p - 1`` nonempty subsets, with no pruning.

    Raises:
        ResourceLimitError: if ``p > UNPRUNED_SCAN_MAX_DIMENSION``
    """
    if matrix.p > UNPRUNED_SCAN_MAX_DIMENSION:
        raise ResourceLimitError(f"unpruned scan over 2^{matrix.p} subsets exceeds the limit")

    supports = []
    for bits in range(1, 1 << matrix.p):
        candidate = SupportSet(bits, matrix.p)
        if len(candidate) == 1:
            k = candidate.smallest()
            if matrix.is_zero(matrix.entries[k - 1, k - 1]):
                supports.append(candidate)
        elif check_condition_A(matrix, candidate) and check_condition_B(matrix, candidate).holds:
            supports.append(candidate)
    return sorted(supports, key=SupportSet.sort_key)


def check_psd_corank_one(matrix: SymMatrix, support: SupportSet) -> bool:
    """True iff ``X(P̄)`` is positive semidefinite with a one-dimensional kernel spanned by a
    strictly positive vector.

    For copositive ``X`` this is the defining property of a minimal zero support.
    """
    block = principal_submatrix(matrix, support)
    if not is_positive_semidefinite(block):
        return False
    basis = kernel_basis(block)
    if len(basis) != 1:
        return False
    return all(matrix.is_positive(v) for v in basis[0])


def supports_comparable(a: SupportSet, b: SupportSet) -> bool:
    """True iff one support contains the other: ``a(P(i))ᵀa(P(j)) = min(|P(i)|, |P(j)|)``."""
    overlap = int(a.incidence_vector().dot(b.incidence_vector()))
    return overlap == min(len(a), len(b))


def verify_support_incomparability(zeros: list[MinimalZero]) -> bool:
    return not any(
        supports_comparable(a.support, b.support) for a, b in itertools.combinations(zeros, 2)
    )


def verify_determinant_gate(matrix: SymMatrix, zeros: list[MinimalZero]) -> bool:
    """True iff ``det X(P̄ \\ {i}) ≠ 0`` for every accepted support ``P̄`` and every ``i ∈ P̄``."""
    for zero in zeros:
        if len(zero.support) < 2:
            continue
        for i in zero.support:
            if is_singular(principal_submatrix(matrix, zero.support.without(i))):
                logger.warning("determinant gate fails for τ(%d) at index %d", zero.index, i)
                return False
    return True


def verify_nonnegative_products(matrix: SymMatrix, zeros: list[MinimalZero]) -> bool:
    """True iff ``Xτ(j) >= 0`` componentwise for every zero."""
    for zero in zeros:
        for value in matrix.matvec(zero.tau):
            if value < 0 and not matrix.is_zero(value):
                logger.warning("Xτ(%d) has a negative component %s", zero.index, value)
                return False
    return True


def kernel_vectors_by_pivot(matrix: SymMatrix, support: SupportSet) -> dict[int, ConditionBResult]:
    """Runs the (B) test once per admissible pivot ``i* ∈ P̄``."""
    return {pivot: check_condition_B(matrix, support, pivot) for pivot in support}


def verify_pivot_independence(matrix: SymMatrix, zeros: list[MinimalZero]) -> bool:
    """True iff every pivot choice yields the same normalized kernel vector on every support."""
    for zero in zeros:
        if len(zero.support) < 2:
            continue
        expected = zero.tau[zero.support.positions()]
        for pivot, result in kernel_vectors_by_pivot(matrix, zero.support).items():
            if not result.holds:
                return False
            if matrix.is_exact:
                same = list(result.kernel_vector) == list(expected)
            else:
                same = np.allclose(result.kernel_vector.astype(float), expected.astype(float), atol=1e-9)
            if not same:
                logger.warning("pivot %d changes the kernel vector of τ(%d)", pivot, zero.index)
                return False
    return True
