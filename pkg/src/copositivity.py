"""Copositivity gate and simplex-grid oracle.

The gate uses the principal-submatrix eigen criterion: ``X`` is copositive iff no principal
submatrix has an eigenvector with strictly positive components for a negative eigenvalue.
The eigen step always runs in floats; exact matrices then confirm the witness with exact
arithmetic, falling back to the grid oracle for borderline cases.
"""

from __future__ import annotations

import itertools
import logging
import math
import warnings
from collections.abc import Iterator
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

import numpy as np
import scipy.linalg

from app_configs import (
    COPOSITIVITY_MAX_DIMENSION,
    COPOSITIVITY_REVERIFY_GRID,
    EXACT_EIGEN_EPS,
    GRID_CHUNK_SIZE,
    GRID_POINT_CAP,
)
from src.exceptions import InvalidArgumentError, ResourceLimitError
from src.model_data import SymMatrix
from src.utils.linalg import integer_scaled

logger = logging.getLogger(__name__)


class CopositivityMethod(Enum):
    NONNEGATIVE = "nonnegative-entries"
    PRINCIPAL_EIGEN = "principal-eigen"
    GRID = "grid"


@dataclass
class CopositivityVerdict:
    """Outcome of :func:`check_copositive`.

    Attributes:
        is_copositive: the verdict
        witness: a point ``t >= 0``, ``‖t‖₁ = 1`` with ``tᵀXt < 0``; present iff not copositive
        method: how the verdict was reached
        witness_value: ``tᵀXt`` at the witness
        submatrices_checked: number of principal submatrices inspected
        warnings: numerically ambiguous decisions met on the way
    """

    is_copositive: bool
    method: CopositivityMethod
    witness: Optional[np.ndarray] = None
    witness_value: Optional[object] = None
    submatrices_checked: int = 0
    warnings: list[str] = field(default_factory=list)


def _warn(verdict_warnings: list[str], message: str) -> None:
    warnings.warn(message, RuntimeWarning, stacklevel=3)
    verdict_warnings.append(message)


def _exact_witness(matrix: SymMatrix, t: np.ndarray) -> tuple[np.ndarray, Fraction]:
    """Rationalizes a float witness and evaluates its quadratic form exactly.

    A short rational approximation is tried first; the exact binary value of the floats
    is the fallback.
    """
    best = None
    for convert in (lambda v: Fraction(v).limit_denominator(10**6), Fraction):
        components = [convert(float(v)) for v in t]
        total = sum(components)
        if total <= 0:
            continue
        point = np.empty(matrix.p, dtype=object)
        point[:] = [c / total for c in components]
        value = matrix.quadratic_form(point)
        if value < 0:
            return point, value
        best = (point, value)
    return best


def check_copositive(matrix: SymMatrix) -> CopositivityVerdict:
    """Decides whether ``matrix`` is copositive.

    Args:
        matrix: symmetric matrix with ``p <= COPOSITIVITY_MAX_DIMENSION``

    Returns:
        CopositivityVerdict: the verdict; a witness is attached when it is negative

    Raises:
        ResourceLimitError: if ``p`` is over the configured limit
    """
    p = matrix.p
    if p > COPOSITIVITY_MAX_DIMENSION:
        raise ResourceLimitError(
            f"copositivity check enumerates 2^p principal submatrices; p={p} exceeds "
            f"the limit {COPOSITIVITY_MAX_DIMENSION}"
        )

    if matrix.is_nonnegative():
        logger.debug("all entries nonnegative, copositive")
        return CopositivityVerdict(True, CopositivityMethod.NONNEGATIVE)

    entries = matrix.to_float()
    scale = matrix.zero_scale
    if matrix.is_exact:
        value_eps = EXACT_EIGEN_EPS * scale
        vector_eps = EXACT_EIGEN_EPS
    else:
        value_eps = matrix.policy.zero_eps * scale
        vector_eps = matrix.policy.positivity_eps

    # exact mode also inspects eigenvalues within value_eps of zero; only an exactly
    # negative form decides there
    cutoff = value_eps if matrix.is_exact else -value_eps

    notes: list[str] = []
    borderline = False
    checked = 0

    for size in range(1, p + 1):
        for subset in itertools.combinations(range(p), size):
            checked += 1
            eigenvalues, eigenvectors = scipy.linalg.eigh(entries[np.ix_(subset, subset)])
            for k in np.flatnonzero(eigenvalues < cutoff):
                vector = eigenvectors[:, k]
                if vector.sum() < 0:
                    vector = -vector
                if not np.all(vector > vector_eps):
                    continue

                t = np.zeros(p)
                t[list(subset)] = vector
                t /= t.sum()

                if matrix.is_exact:
                    point, value = _exact_witness(matrix, t)
                    if value < 0:
                        logger.debug("exact witness on submatrix %s", [q + 1 for q in subset])
                        return CopositivityVerdict(
                            False, CopositivityMethod.PRINCIPAL_EIGEN, point, value, checked, notes
                        )
                    if eigenvalues[k] >= -value_eps:
                        continue
                else:
                    value = matrix.quadratic_form(t)
                    if value < 0 and not matrix.is_zero(value):
                        logger.debug("witness on submatrix %s", [q + 1 for q in subset])
                        return CopositivityVerdict(
                            False, CopositivityMethod.PRINCIPAL_EIGEN, t, value, checked, notes
                        )

                borderline = True
                _warn(
                    notes,
                    f"borderline eigen witness on submatrix {[q + 1 for q in subset]}: "
                    f"eigenvalue {eigenvalues[k]:.3g} but tᵀXt = {float(value):.3g}",
                )

    if borderline:
        return _reverify_on_grid(matrix, checked, notes)

    logger.debug("no negative principal eigenvector in %d submatrices", checked)
    return CopositivityVerdict(True, CopositivityMethod.PRINCIPAL_EIGEN, submatrices_checked=checked, warnings=notes)


def _reverify_on_grid(matrix: SymMatrix, checked: int, notes: list[str]) -> CopositivityVerdict:
    """Settles a borderline eigen verdict with :func:`grid_min`."""
    N = COPOSITIVITY_REVERIFY_GRID
    if grid_size(matrix.p, N) > GRID_POINT_CAP:
        _warn(notes, f"grid re-verification skipped: grid N={N} exceeds the point cap")
        return CopositivityVerdict(True, CopositivityMethod.PRINCIPAL_EIGEN, submatrices_checked=checked, warnings=notes)

    value, point = grid_min(matrix, N)
    if value < 0 and not matrix.is_zero(value):
        return CopositivityVerdict(False, CopositivityMethod.GRID, point, value, checked, notes)
    return CopositivityVerdict(True, CopositivityMethod.GRID, submatrices_checked=checked, warnings=notes)


def grid_size(p: int, N: int) -> int:
    """Number of simplex grid points ``m/N`` with ``m ∈ ℕᵖ``, ``‖m‖₁ = N``."""
    return math.comb(N + p - 1, p - 1)


def iter_grid_points(p: int, N: int, chunk_size: int = GRID_CHUNK_SIZE) -> Iterator[np.ndarray]:
    """Yields the integer grid ``{m ∈ ℕᵖ : ‖m‖₁ = N}`` in chunks of rows.

    Points come in the order of ``itertools.combinations_with_replacement``, so the
    first point is ``N·e₁``.

    Raises:
        InvalidArgumentError: if ``N < 1`` or ``p < 1``
    """
    if N < 1 or p < 1:
        raise InvalidArgumentError(f"grid needs N >= 1 and p >= 1, got N={N}, p={p}")

    combos = itertools.combinations_with_replacement(range(p), N)
    while True:
        chunk = list(itertools.islice(combos, chunk_size))
        if not chunk:
            return
        positions = np.array(chunk, dtype=np.intp)
        counts = np.zeros((len(chunk), p), dtype=np.int64)
        rows = np.repeat(np.arange(len(chunk)), N)
        np.add.at(counts, (rows, positions.ravel()), 1)
        yield counts


def check_grid_size(p: int, N: int) -> int:
    size = grid_size(p, N)
    if size > GRID_POINT_CAP:
        raise ResourceLimitError(
            f"simplex grid with p={p}, N={N} has {size} points, over the cap {GRID_POINT_CAP}"
        )
    return size


def grid_min(matrix: SymMatrix, N: int) -> tuple[object, np.ndarray]:
    """Minimum of ``tᵀXt`` over the simplex grid with denominator ``N``.

    Args:
        matrix: the matrix
        N: grid denominator, at least 1

    Returns:
        tuple: the minimum value (a ``Fraction`` in exact mode) and the first grid point
        attaining it

    Raises:
        InvalidArgumentError: if ``N < 1``
        ResourceLimitError: if the grid has more than ``GRID_POINT_CAP`` points
    """
    if N < 1:
        raise InvalidArgumentError(f"grid denominator must be at least 1, got {N}")
    check_grid_size(matrix.p, N)

    if matrix.is_exact:
        rows, scale = integer_scaled(matrix.entries)
        bound = max(abs(v) for row in rows for v in row) * N * N
        dtype = np.int64 if bound < 2**62 else object
        weights = np.array(rows, dtype=dtype)
    else:
        weights = matrix.to_float()
        scale = 1

    best_value = None
    best_point = None
    for counts in iter_grid_points(matrix.p, N):
        counts = counts.astype(weights.dtype)
        values = (counts.dot(weights) * counts).sum(axis=1)
        if weights.dtype == object:
            k = min(range(len(values)), key=values.__getitem__)
        else:
            k = int(np.argmin(values))
        if best_value is None or values[k] < best_value:
            best_value = values[k]
            best_point = counts[k]

    if matrix.is_exact:
        value = Fraction(int(best_value), scale * N * N)
        point = np.empty(matrix.p, dtype=object)
        point[:] = [Fraction(int(m), N) for m in best_point]
    else:
        value = float(best_value) / (N * N)
        point = best_point.astype(float) / N

    logger.debug("grid_min N=%d: %s", N, value)
    return value, point
