"""Rank, kernel, determinant and solve for exact and float symmetric matrices.

Exact mode works on ``fractions.Fraction`` entries: rank and determinant come from
fraction-free (Bareiss) elimination of the integer-scaled matrix, kernels and solutions
from Gauss-Jordan elimination over the rationals. Float mode delegates to ``scipy.linalg``
with the thresholds of the matrix's :class:`TolerancePolicy`.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import TYPE_CHECKING

import numpy as np
import scipy.linalg

from src.exceptions import InvalidArgumentError, SingularSystemError
from src.model_data import SupportSet, SymMatrix

if TYPE_CHECKING:
    from numpy.typing import ArrayLike


def principal_submatrix(matrix: SymMatrix, support: SupportSet) -> SymMatrix:
    """``X(P̄)``: rows and columns of ``support`` in ascending index order.

    Raises:
        InvalidArgumentError: if ``support`` is empty or wider than the matrix
    """
    if not len(support):
        raise InvalidArgumentError("principal submatrix of an empty index set")
    if support.width != matrix.p:
        raise InvalidArgumentError(f"support of width {support.width} for a {matrix.p}x{matrix.p} matrix")
    positions = support.positions()
    return SymMatrix._trusted(
        matrix.entries[np.ix_(positions, positions)], matrix.mode, matrix.policy
    )


def integer_scaled(entries: np.ndarray) -> tuple[list[list[int]], int]:
    """Returns ``(Z, L)`` with ``Z = L * A`` integral and ``L`` the lcm of the denominators."""
    scale = 1
    for value in entries.ravel():
        scale = math.lcm(scale, Fraction(value).denominator)
    rows = [[int(Fraction(value) * scale) for value in row] for row in entries]
    return rows, scale


def _bareiss(rows: list[list[int]]) -> tuple[int, int]:
    """Fraction-free elimination of an integer matrix.

    Returns:
        tuple[int, int]: the rank and, for square input, the determinant (0 if singular)
    """
    rows = [list(row) for row in rows]
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    rank = 0
    sign = 1
    previous = 1

    for column in range(n_cols):
        pivot = next((r for r in range(rank, n_rows) if rows[r][column] != 0), None)
        if pivot is None:
            continue
        if pivot != rank:
            rows[rank], rows[pivot] = rows[pivot], rows[rank]
            sign = -sign
        for r in range(rank + 1, n_rows):
            for c in range(column + 1, n_cols):
                rows[r][c] = (rows[r][c] * rows[rank][column] - rows[r][column] * rows[rank][c]) // previous
            rows[r][column] = 0
        previous = rows[rank][column]
        rank += 1
        if rank == n_rows:
            break

    determinant = 0
    if n_rows == n_cols and rank == n_rows:
        determinant = sign * rows[-1][-1]
    return rank, determinant


def _gauss_jordan(entries: np.ndarray) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over the rationals and its pivot columns."""
    rows = [[Fraction(v) for v in row] for row in entries]
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for column in range(n_cols):
        pivot = next((k for k in range(r, n_rows) if rows[k][column] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        lead = rows[r][column]
        rows[r] = [v / lead for v in rows[r]]
        for k in range(n_rows):
            if k != r and rows[k][column] != 0:
                factor = rows[k][column]
                rows[k] = [a - factor * b for a, b in zip(rows[k], rows[r])]
        pivots.append(column)
        r += 1
        if r == n_rows:
            break
    return rows, pivots


def rank(matrix: SymMatrix) -> int:
    """Rank of ``matrix``.

    Float mode counts singular values above ``rank_eps * s_max``.
    """
    if matrix.is_exact:
        rows, _ = integer_scaled(matrix.entries)
        return _bareiss(rows)[0]

    singular_values = scipy.linalg.svdvals(matrix.entries)
    if not singular_values.size or singular_values[0] == 0:
        return 0
    return int(np.sum(singular_values > matrix.policy.rank_eps * singular_values[0]))


def determinant(matrix: SymMatrix):
    """Determinant; a ``Fraction`` in exact mode."""
    if matrix.is_exact:
        rows, scale = integer_scaled(matrix.entries)
        return Fraction(_bareiss(rows)[1], scale**matrix.p)
    return float(scipy.linalg.det(matrix.entries))


def is_singular(matrix: SymMatrix) -> bool:
    """Singularity test.

    Float mode compares ``|det|`` against ``zero_eps`` times the product of the row norms
    (Hadamard's bound), so the test does not depend on the scale of the matrix.
    """
    if matrix.is_exact:
        return determinant(matrix) == 0

    norms = np.linalg.norm(matrix.entries, axis=1)
    if np.any(norms == 0):
        return True
    bound = float(np.prod(norms))
    return abs(determinant(matrix)) <= matrix.policy.zero_eps * bound


def canonicalize(vector: np.ndarray, is_zero=None) -> np.ndarray:
    """Scales a nonzero vector so its first nonzero entry is positive and ``‖v‖₁ = 1``."""
    is_zero = is_zero or (lambda v: v == 0)
    lead = next((v for v in vector if not is_zero(v)), None)
    if lead is None:
        raise InvalidArgumentError("cannot canonicalize the zero vector")
    norm = sum(abs(v) for v in vector)
    if lead < 0:
        norm = -norm
    return np.array([v / norm for v in vector], dtype=vector.dtype)


def kernel_basis(matrix: SymMatrix) -> list[np.ndarray]:
    """A basis of ``ker(matrix)``, each vector canonicalized.

    Exact mode returns rational vectors read off the reduced row echelon form;
    float mode uses ``scipy.linalg.null_space`` with ``rcond=rank_eps``.
    """
    if matrix.is_exact:
        rows, pivots = _gauss_jordan(matrix.entries)
        free = [c for c in range(matrix.p) if c not in pivots]
        basis = []
        for f in free:
            vector = np.empty(matrix.p, dtype=object)
            vector[:] = [Fraction(0)] * matrix.p
            vector[f] = Fraction(1)
            for r, c in enumerate(pivots):
                vector[c] = -rows[r][f]
            basis.append(canonicalize(vector))
        return basis

    null = scipy.linalg.null_space(matrix.entries, rcond=matrix.policy.rank_eps)
    return [
        canonicalize(null[:, k], lambda v: abs(v) <= matrix.policy.zero_eps)
        for k in range(null.shape[1])
    ]


def solve(matrix: SymMatrix, rhs: ArrayLike) -> np.ndarray:
    """Solves ``matrix · y = rhs``.

    Raises:
        SingularSystemError: if ``matrix`` is singular (exactly, or per :func:`is_singular`)
    """
    rhs = matrix.vector(rhs)
    if len(rhs) != matrix.p:
        raise InvalidArgumentError(f"right-hand side of length {len(rhs)} for p={matrix.p}")

    if matrix.is_exact:
        augmented = np.empty((matrix.p, matrix.p + 1), dtype=object)
        augmented[:, : matrix.p] = matrix.entries
        augmented[:, matrix.p] = rhs
        rows, pivots = _gauss_jordan(augmented)
        if pivots != list(range(matrix.p)):
            raise SingularSystemError(f"singular {matrix.p}x{matrix.p} system")
        solution = np.empty(matrix.p, dtype=object)
        solution[:] = [rows[k][matrix.p] for k in range(matrix.p)]
        return solution

    if is_singular(matrix):
        raise SingularSystemError(f"singular {matrix.p}x{matrix.p} system")
    try:
        return scipy.linalg.solve(matrix.entries, rhs, assume_a="sym")
    except (scipy.linalg.LinAlgError, ValueError) as err:
        raise SingularSystemError(str(err)) from err


def is_positive_semidefinite(matrix: SymMatrix) -> bool:
    """PSD test: symmetric elimination over the rationals, or ``eigvalsh`` in float mode.

    Exact mode uses the fact that a PSD matrix with a zero diagonal entry has a zero row
    there, and otherwise eliminates on that (positive) pivot.
    """
    if not matrix.is_exact:
        smallest = scipy.linalg.eigvalsh(matrix.entries)[0]
        return smallest >= -matrix.policy.zero_eps * matrix.zero_scale

    rows = [[Fraction(v) for v in row] for row in matrix.entries]
    remaining = list(range(matrix.p))
    while remaining:
        k = remaining.pop(0)
        lead = rows[k][k]
        if lead < 0:
            return False
        if lead == 0:
            if any(rows[k][q] != 0 for q in remaining):
                return False
            continue
        for r in remaining:
            factor = rows[r][k] / lead
            if factor:
                for c in remaining:
                    rows[r][c] -= factor * rows[k][c]
    return True

