from __future__ import annotations

import math
import numbers
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from decimal import Decimal
from enum import Enum
from functools import cached_property
from fractions import Fraction
from pathlib import Path
from typing import TYPE_CHECKING, Optional, Union

import numpy as np

from app_configs import POSITIVITY_EPS, RANK_EPS, ZERO_EPS
from src.exceptions import AsymmetryError, InvalidArgumentError, MatrixParseError
from src.utils.utils import parse_token, read_matrix_text

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

Scalar = Union[Fraction, float]


class MatrixMode(Enum):
    EXACT = "exact"
    FLOAT = "float"


@dataclass(frozen=True)
class TolerancePolicy:
    """Thresholds used by float-mode decisions.

    Attributes:
        rank_eps (float): singular values at or below ``rank_eps`` times the largest
            one count as zero
        zero_eps (float): scalar-is-zero threshold (scaled by ``1 + max|X|``)
        positivity_eps (float): strict-positivity threshold
    """

    rank_eps: float = RANK_EPS
    zero_eps: float = ZERO_EPS
    positivity_eps: float = POSITIVITY_EPS

    def __post_init__(self):
        for name in ("rank_eps", "zero_eps", "positivity_eps"):
            value = getattr(self, name)
            if not (isinstance(value, numbers.Real) and math.isfinite(value) and value > 0):
                raise InvalidArgumentError(f"{name} must be a finite positive number, got {value}")

    def as_dict(self) -> dict:
        return {
            "rank_eps": self.rank_eps,
            "zero_eps": self.zero_eps,
            "positivity_eps": self.positivity_eps,
        }


def is_rational_entry(value) -> bool:
    """Returns True if ``value`` can be ingested exactly.

    Integers, fractions, decimals and rational literal strings qualify; binary floats
    do not (they select float mode when the mode is detected automatically).
    """
    if isinstance(value, bool):
        return False
    if isinstance(value, (numbers.Integral, Fraction, Decimal)):
        return not isinstance(value, Decimal) or value.is_finite()
    if isinstance(value, str):
        try:
            parse_token(value)
        except (ValueError, ZeroDivisionError):
            return False
        return True
    return False


def to_scalar(value, mode: MatrixMode) -> Scalar:
    """Coerces a number or numeric literal to the scalar type of ``mode``.

    Args:
        value: an integer, fraction, decimal, float or literal string
        mode: target arithmetic mode

    Returns:
        Scalar: a ``Fraction`` in exact mode, a finite ``float`` in float mode

    Raises:
        InvalidArgumentError: if the value is not a finite number
    """
    if isinstance(value, bool):
        raise InvalidArgumentError(f"boolean {value} is not a matrix entry")

    try:
        if isinstance(value, str):
            exact = parse_token(value)
        elif isinstance(value, (numbers.Integral, Fraction)):
            exact = Fraction(value)
        elif isinstance(value, Decimal):
            exact = Fraction(value)
        elif isinstance(value, numbers.Real):
            if not math.isfinite(value):
                raise InvalidArgumentError(f"non-finite value {value}")
            if mode is MatrixMode.FLOAT:
                return float(value)
            # decimal reading of the float, so 0.1 becomes 1/10
            exact = Fraction(repr(float(value)))
        else:
            raise InvalidArgumentError(f"unsupported value {value!r}")
    except (ValueError, ZeroDivisionError, OverflowError) as err:
        if isinstance(err, InvalidArgumentError):
            raise
        raise InvalidArgumentError(f"not a finite rational: {value!r}") from err

    if mode is MatrixMode.EXACT:
        return exact

    result = float(exact)
    if not math.isfinite(result):
        raise InvalidArgumentError(f"value {value!r} overflows a float")
    return result


def to_vector(values: Iterable, mode: MatrixMode) -> np.ndarray:
    """Builds a 1-D vector of ``mode`` scalars (object array of fractions in exact mode)."""
    scalars = [to_scalar(v, mode) for v in values]
    if mode is MatrixMode.EXACT:
        vector = np.empty(len(scalars), dtype=object)
        vector[:] = scalars
        return vector
    return np.array(scalars, dtype=float)


def resolve_mode(mode: Union[MatrixMode, str, None]) -> Optional[MatrixMode]:
    """Turns ``"exact"``/``"float"`` (or None) into a :class:`MatrixMode`."""
    if mode is None or isinstance(mode, MatrixMode):
        return mode
    try:
        return MatrixMode(str(mode).strip().lower())
    except ValueError:
        raise InvalidArgumentError(f"unknown mode {mode!r}; use 'exact' or 'float'")


@dataclass(frozen=True)
class SupportSet:
    """A subset of ``P = {1, ..., width}`` stored as a fixed-width bit mask.

    Bit ``k - 1`` is set iff index ``k`` belongs to the set, so the mask is the incidence
    vector of the subset read from index ``width`` down to 1.
    """

    bits: int
    width: int

    def __post_init__(self):
        if self.width < 0 or self.bits < 0 or self.bits >> self.width:
            raise InvalidArgumentError(f"mask {self.bits:#b} does not fit width {self.width}")

    @classmethod
    def from_indices(cls, indices: Iterable[int], width: int) -> SupportSet:
        bits = 0
        for k in indices:
            if not 1 <= k <= width:
                raise InvalidArgumentError(f"index {k} outside 1..{width}")
            bits |= 1 << (k - 1)
        return cls(bits, width)

    @classmethod
    def full(cls, width: int) -> SupportSet:
        return cls((1 << width) - 1, width)

    @classmethod
    def of_vector(cls, vector: ArrayLike, is_positive) -> SupportSet:
        """The support of a nonnegative vector, judged by ``is_positive``."""
        return cls.from_indices(
            (k for k, value in enumerate(vector, start=1) if is_positive(value)), len(vector)
        )

    def indices(self) -> tuple[int, ...]:
        """Members as 1-based indices in ascending order."""
        return tuple(k for k in range(1, self.width + 1) if self.bits >> (k - 1) & 1)

    def positions(self) -> list[int]:
        """Members as 0-based array positions in ascending order."""
        return [k - 1 for k in self.indices()]

    def incidence_vector(self) -> np.ndarray:
        return np.array([self.bits >> q & 1 for q in range(self.width)], dtype=int)

    def issubset(self, other: SupportSet) -> bool:
        """Non-strict containment."""
        return self.bits & ~other.bits == 0

    def union(self, other: SupportSet) -> SupportSet:
        return SupportSet(self.bits | other.bits, max(self.width, other.width))

    __or__ = union

    def without(self, k: int) -> SupportSet:
        return SupportSet(self.bits & ~(1 << (k - 1)), self.width)

    def smallest(self) -> int:
        if not self.bits:
            raise InvalidArgumentError("empty support has no smallest index")
        return (self.bits & -self.bits).bit_length()

    def sort_key(self) -> tuple[int, int]:
        """Cardinality first, then the mask value."""
        return len(self), self.bits

    def __len__(self) -> int:
        return bin(self.bits).count("1")

    def __iter__(self):
        return iter(self.indices())

    def __contains__(self, k: int) -> bool:
        return 1 <= k <= self.width and bool(self.bits >> (k - 1) & 1)

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.indices())) + "}"


class SymMatrix:
    """A symmetric ``p x p`` matrix over exact rationals or floats.

    Exact-mode entries are ``fractions.Fraction`` objects in a numpy object array;
    float-mode entries are finite ``float64`` values. The entries are read-only.

    Args:
        rows (ArrayLike): the ``p`` rows of ``p`` entries
        mode (MatrixMode | str, optional): arithmetic mode. Detected when None: exact
            if every entry is rational-parseable, float otherwise.
        policy (TolerancePolicy, optional): float-mode thresholds. Defaults to the
            values in ``app_configs.py``.

    Raises:
        InvalidArgumentError: if the rows are empty, not square or hold non-finite values
        AsymmetryError: if the matrix is not symmetric (exactly in exact mode, within
            ``zero_eps`` in float mode)
    """

    def __init__(
        self,
        rows: ArrayLike,
        mode: Union[MatrixMode, str, None] = None,
        policy: Optional[TolerancePolicy] = None,
    ):
        rows = [list(row) for row in rows]
        p = len(rows)
        if p == 0:
            raise InvalidArgumentError("matrix must have at least one row")
        for k, row in enumerate(rows, start=1):
            if len(row) != p:
                raise InvalidArgumentError(f"row {k} has {len(row)} entries, expected {p}")

        mode = resolve_mode(mode)
        if mode is None:
            exact = all(is_rational_entry(value) for row in rows for value in row)
            mode = MatrixMode.EXACT if exact else MatrixMode.FLOAT

        self._mode = mode
        self._policy = policy or TolerancePolicy()

        if mode is MatrixMode.EXACT:
            entries = np.empty((p, p), dtype=object)
            for k, row in enumerate(rows):
                for q, value in enumerate(row):
                    entries[k, q] = to_scalar(value, mode)
            self._check_symmetry(entries, lambda a, b: a == b)
        else:
            entries = np.array([[to_scalar(v, mode) for v in row] for row in rows], dtype=float)
            tolerance = self._policy.zero_eps * (1.0 + float(np.max(np.abs(entries))))
            self._check_symmetry(entries, lambda a, b: abs(a - b) <= tolerance)
            entries = (entries + entries.T) / 2.0

        entries.setflags(write=False)
        self._entries = entries

    @staticmethod
    def _check_symmetry(entries: np.ndarray, same) -> None:
        p = entries.shape[0]
        for k in range(p):
            for q in range(k + 1, p):
                if not same(entries[k, q], entries[q, k]):
                    raise AsymmetryError(
                        f"matrix is not symmetric: entry ({k + 1},{q + 1}) = {entries[k, q]} "
                        f"but ({q + 1},{k + 1}) = {entries[q, k]}",
                        row=q + 1,
                        column=k + 1,
                    )

    @classmethod
    def _trusted(cls, entries: np.ndarray, mode: MatrixMode, policy: TolerancePolicy) -> SymMatrix:
        """Wraps an array already known to be symmetric and of the right scalar type."""
        matrix = cls.__new__(cls)
        entries = np.array(entries, dtype=object if mode is MatrixMode.EXACT else float)
        entries.setflags(write=False)
        matrix._entries = entries
        matrix._mode = mode
        matrix._policy = policy
        return matrix

    @classmethod
    def identity(cls, p: int, mode: MatrixMode = MatrixMode.EXACT) -> SymMatrix:
        return cls([[int(k == q) for q in range(p)] for k in range(p)], mode=mode)

    @classmethod
    def zeros(cls, p: int, mode: MatrixMode = MatrixMode.EXACT) -> SymMatrix:
        return cls([[0] * p for _ in range(p)], mode=mode)

    @classmethod
    def load_from_file(
        cls,
        filename: Union[Path, str],
        mode: Union[MatrixMode, str, None] = None,
        policy: Optional[TolerancePolicy] = None,
    ) -> SymMatrix:
        """Loads a matrix from a text or JSON file, see :func:`parse_matrix`."""
        return parse_matrix(Path(filename).read_text(), mode=mode, policy=policy)

    @property
    def p(self) -> int:
        return self._entries.shape[0]

    @property
    def mode(self) -> MatrixMode:
        return self._mode

    @property
    def is_exact(self) -> bool:
        return self._mode is MatrixMode.EXACT

    @property
    def policy(self) -> TolerancePolicy:
        return self._policy

    @property
    def entries(self) -> np.ndarray:
        """The read-only ``p x p`` entry array."""
        return self._entries

    @cached_property
    def zero_scale(self) -> float:
        """``1 + max|X_kq|``, the scale of float-mode zero tests."""
        return 1.0 + float(np.max(np.abs(self.to_float())))

    def __getitem__(self, key):
        return self._entries[key]

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymMatrix):
            return NotImplemented
        return (
            self._mode is other._mode
            and self._entries.shape == other._entries.shape
            and bool(np.all(self._entries == other._entries))
        )

    def __hash__(self):
        return hash((self._mode, tuple(self._entries.ravel().tolist())))

    def __repr__(self) -> str:
        rows = "; ".join(" ".join(str(v) for v in row) for row in self._entries)
        return f"SymMatrix([{rows}], mode={self._mode.value})"

    def is_zero(self, value: Scalar) -> bool:
        """Scalar zero test: exact equality, or ``|value| <= zero_eps * (1 + max|X|)``."""
        if self.is_exact:
            return value == 0
        return abs(float(value)) <= self._policy.zero_eps * self.zero_scale

    def is_positive(self, value: Scalar) -> bool:
        """Strict positivity: exact sign, or ``value > positivity_eps``."""
        if self.is_exact:
            return value > 0
        return float(value) > self._policy.positivity_eps

    def scalar(self, value) -> Scalar:
        return to_scalar(value, self._mode)

    def vector(self, values: Iterable) -> np.ndarray:
        return to_vector(values, self._mode)

    def matvec(self, t: ArrayLike) -> np.ndarray:
        """``X t``, in the matrix's scalar type."""
        return self._entries.dot(self.vector(t))

    def quadratic_form(self, t: ArrayLike, u: Optional[ArrayLike] = None) -> Scalar:
        """``tᵀ X u`` (``u`` defaults to ``t``)."""
        t = self.vector(t)
        u = t if u is None else self.vector(u)
        return t.dot(self._entries.dot(u))

    def to_float(self) -> np.ndarray:
        return np.array(self._entries, dtype=float)

    def as_mode(self, mode: Union[MatrixMode, str]) -> SymMatrix:
        """The same matrix in another arithmetic mode."""
        mode = resolve_mode(mode)
        if mode is self._mode:
            return self
        return SymMatrix(self._entries.tolist(), mode=mode, policy=self._policy)

    def with_policy(self, policy: TolerancePolicy) -> SymMatrix:
        return SymMatrix._trusted(self._entries, self._mode, policy)

    def is_nonnegative(self) -> bool:
        return all(v >= 0 for v in self._entries.ravel())


def parse_matrix(
    source: str,
    mode: Union[MatrixMode, str, None] = None,
    policy: Optional[TolerancePolicy] = None,
) -> SymMatrix:
    """Parses matrix text into a :class:`SymMatrix`.

    Args:
        source: whitespace separated rows (integers, ``a/b`` fractions, decimals) or a JSON
            object ``{"p": int, "rows": [[...]]}``
        mode: arithmetic mode; detected from the entries when None
        policy: float-mode thresholds

    Returns:
        SymMatrix: the parsed matrix

    Raises:
        MatrixParseError: on ragged rows, unparseable tokens or asymmetric input, with the
            1-based row and column of the offending entry
    """
    rows = read_matrix_text(source)
    resolved = resolve_mode(mode)

    values = []
    for k, row in enumerate(rows, start=1):
        parsed = []
        for q, token in enumerate(row, start=1):
            try:
                parsed.append(to_scalar(token, resolved or MatrixMode.EXACT))
            except InvalidArgumentError:
                if resolved is MatrixMode.EXACT:
                    raise MatrixParseError(f"unparseable entry {token!r}", row=k, column=q)
                try:
                    parsed.append(float(token))
                except ValueError:
                    raise MatrixParseError(f"unparseable entry {token!r}", row=k, column=q)
                if not math.isfinite(parsed[-1]):
                    raise MatrixParseError(f"non-finite entry {token!r}", row=k, column=q)
        values.append(parsed)

    try:
        return SymMatrix(values, mode=resolved, policy=policy)
    except AsymmetryError as err:
        raise MatrixParseError(str(err), row=err.row, column=err.column) from err
    except InvalidArgumentError as err:
        raise MatrixParseError(str(err)) from err


def support_of(t: Sequence, matrix: SymMatrix) -> SupportSet:
    """The support of ``t`` using the positivity test of ``matrix``."""
    return SupportSet.of_vector(t, matrix.is_positive)
