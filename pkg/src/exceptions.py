"""Exceptions raised by the copositive zero-set analyzer."""

from __future__ import annotations

from typing import Optional


class CopzeroError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(CopzeroError, ValueError):
    """An argument is outside the domain of the operation."""


class AsymmetryError(InvalidArgumentError):
    """A matrix that must be symmetric is not.

    Attributes:
        row (int): 1-based row of the first asymmetric entry
        column (int): 1-based column of the first asymmetric entry
    """

    def __init__(self, message: str, row: int, column: int):
        super().__init__(message)
        self.row = row
        self.column = column


class MatrixParseError(CopzeroError, ValueError):
    """Matrix text could not be turned into a symmetric matrix."""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[int] = None):
        self.row = row
        self.column = column
        if row is not None and column is not None:
            message = f"row {row}, column {column}: {message}"
        elif row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class SingularSystemError(CopzeroError, ArithmeticError):
    """A linear system has no unique solution."""


class ContractError(CopzeroError, ValueError):
    """An operation was called with its precondition violated."""


class ResourceLimitError(CopzeroError, RuntimeError):
    """An enumeration would exceed its configured size limit."""
