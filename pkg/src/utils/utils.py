from __future__ import annotations

import json
import os
from fractions import Fraction
from functools import cache
from pathlib import Path
from typing import TYPE_CHECKING, Union

import pandas as pd
from tabulate import tabulate

from app_configs import FIXTURES, INPUT_PATH
from src.exceptions import InvalidArgumentError, MatrixParseError

if TYPE_CHECKING:
    from numpy.typing import ArrayLike


def read_matrix_text(text: str) -> list[list[str]]:
    """Splits matrix text into rows of entry tokens.

    Two layouts are accepted: whitespace separated rows (one row per non-empty line,
    ``#`` starts a comment) or a JSON object ``{"p": int, "rows": [[...], ...]}``.

    Args:
        text: the matrix text

    Returns:
        list[list[str]]: the entry tokens, row by row

    Raises:
        MatrixParseError: if the text is empty, ragged, or the JSON layout is malformed
    """
    stripped = text.strip()
    if not stripped:
        raise MatrixParseError("empty matrix text")

    if stripped.startswith("{"):
        return _read_json_matrix(stripped)

    rows = []
    for line in stripped.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())

    if not rows:
        raise MatrixParseError("empty matrix text")

    p = len(rows)
    for k, row in enumerate(rows, start=1):
        if len(row) != p:
            raise MatrixParseError(f"expected {p} entries, found {len(row)}", row=k)
    return rows


def _read_json_matrix(text: str) -> list[list[str]]:
    """Reads the ``{"p": int, "rows": [[...]]}`` layout."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise MatrixParseError(f"invalid JSON: {err.msg}") from err

    if not isinstance(data, dict) or "rows" not in data:
        raise MatrixParseError('JSON matrix must be an object with a "rows" field')

    rows = data["rows"]
    p = data.get("p", len(rows))
    if not isinstance(p, int) or not isinstance(rows, list) or len(rows) != p:
        raise MatrixParseError(f'"p" must equal the number of rows ({len(rows)})')

    tokens = []
    for k, row in enumerate(rows, start=1):
        if not isinstance(row, list) or len(row) != p:
            raise MatrixParseError(f"expected {p} entries", row=k)
        for q, entry in enumerate(row, start=1):
            if isinstance(entry, bool) or not isinstance(entry, (int, float, str)):
                raise MatrixParseError(f"unsupported entry {entry!r}", row=k, column=q)
        # keep the JSON literal text so that 0.1 stays the decimal 1/10
        tokens.append([entry if isinstance(entry, str) else json.dumps(entry) for entry in row])
    return tokens


def parse_token(token: str) -> Fraction:
    """Parses an integer, ``a/b`` fraction or finite decimal token.

    Raises:
        ValueError: if the token is not a finite rational literal
    """
    return Fraction(token.strip())


def read_edge_list(text: str) -> tuple[int, set[tuple[int, int]]]:
    """Reads an edge-list: first line ``n <count>``, then one ``i j`` pair per line (1-based).

    Args:
        text: the edge-list text

    Returns:
        tuple[int, set[tuple[int, int]]]: the vertex count and the edges as ``(i, j)``, ``i < j``

    Raises:
        InvalidArgumentError: if the header, a pair or a vertex index is malformed
    """
    lines = [line.split("#", 1)[0].strip() for line in text.splitlines()]
    lines = [line for line in lines if line]
    if not lines:
        raise InvalidArgumentError("empty edge list")

    header = lines[0].split()
    if len(header) != 2 or header[0] != "n" or not header[1].isdigit():
        raise InvalidArgumentError(f"edge list must start with 'n <count>', got {lines[0]!r}")
    n = int(header[1])

    edges = set()
    for line_number, line in enumerate(lines[1:], start=2):
        try:
            i, j = map(int, line.split())
        except ValueError:
            raise InvalidArgumentError(f"line {line_number}: expected 'i j', got {line!r}")
        edges.add((min(i, j), max(i, j)))
    return n, edges


def write_edge_list(n: int, edges: set[tuple[int, int]], path: Union[Path, str]) -> None:
    """Writes a graph in the edge-list layout read by :func:`read_edge_list`."""
    with open(path, "w") as f:
        f.write(f"n {n}\n")
        for i, j in sorted(edges):
            f.write(f"{i} {j}\n")


def read_point_text(text: str) -> list[str]:
    """Splits a point file (whitespace separated coordinates) into tokens."""
    tokens = text.split()
    if not tokens:
        raise InvalidArgumentError("empty point file")
    return tokens


@cache
def load_fixture_text(name: str) -> str:
    """Returns the matrix text of a built-in fixture.

    Args:
        name: fixture name, see ``FIXTURES`` in ``app_configs.py``

    Raises:
        InvalidArgumentError: if the fixture is unknown
    """
    if name not in FIXTURES:
        raise InvalidArgumentError(
            f"unknown fixture {name!r}; choose from {', '.join(sorted(FIXTURES))}"
        )
    return (INPUT_PATH / FIXTURES[name]).read_text()


def format_scalar(value) -> str:
    """Formats an exact scalar as ``num/den`` and a float with ``repr``."""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return repr(float(value))


def format_vector(values: ArrayLike) -> str:
    """Formats a vector compactly for text tables."""
    return "(" + ", ".join(_short_scalar(v) for v in values) + ")"


def _short_scalar(value) -> str:
    if isinstance(value, Fraction):
        return str(value)
    return f"{float(value):.6g}"


def render_table(df: pd.DataFrame, title: str) -> str:
    """Renders a DataFrame as a titled text table.

    Args:
        df: the rows to render
        title: section title

    Returns:
        str: the rendered section
    """
    header = " " + "=" * 10 + f" {title} " + "=" * 10
    if df.empty:
        return header + "\n(none)\n"
    return header + "\n" + tabulate(df, headers="keys", showindex=False) + "\n"


def write_report_to_file(text: str, report_file_path: Union[Path, str]) -> None:
    """Write a rendered report to a file.

    Args:
        text: the rendered report
        report_file_path: path to the output file. If it doesn't exist
            a new file is created
    """
    path = Path(report_file_path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True)

    with open(path, "w") as f:
        f.write(text)
        if not text.endswith("\n"):
            f.write("\n")

    print(f"\nSaved report to {os.path.join(os.getcwd(), report_file_path)}")
