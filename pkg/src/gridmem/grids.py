"""Binary mark grids read as extensional function tables.

A grid is an ``n_cols x m_rows`` boolean matrix. Columns are argument
positions, rows are value positions, and a mark at (i, j) states that
argument i may take value j. A grid with at most one mark per column is a
*function grid*; with exactly one mark per column it is *total*. Grids with
multi-mark columns represent indeterminate relations ("abstractions").

All public positions (columns, rows, index digits) are 1-based; digit 0
means "undefined at this argument".
"""

from __future__ import annotations

import math
from collections.abc import Iterator, Sequence

import numpy as np

from .errors import NotAFunctionError, ParseError, ShapeError

_MAX_FUNCTION_COUNT = 2**63 - 1

TEXT_MAGIC = "#dtm-grid"


class Grid:
    """Immutable binary mark matrix of ``n_cols`` columns and ``m_rows`` rows.

    Internally marks are stored column-major-ish as a read-only boolean
    array of shape ``(n_cols, m_rows)``: ``marks[i, j]`` is column i+1,
    row j+1. Instances are hashable and safe to share between threads.
    """

    __slots__ = ("_marks",)

    def __init__(self, marks):
        arr = np.array(marks, dtype=bool)
        if arr.ndim != 2:
            raise ShapeError(f"marks must be a 2-D matrix, got {arr.ndim}-D")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ShapeError(
                f"grid needs at least one column and one row, got {arr.shape}"
            )
        arr.setflags(write=False)
        self._marks = arr

    @property
    def marks(self) -> np.ndarray:
        """Read-only (n_cols, m_rows) boolean mark matrix."""
        return self._marks

    @property
    def n_cols(self) -> int:
        return self._marks.shape[0]

    @property
    def m_rows(self) -> int:
        return self._marks.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._marks.shape

    def column(self, i: int) -> np.ndarray:
        """Marks of 1-based column i as a read-only length-m_rows vector."""
        if not 1 <= i <= self.n_cols:
            raise ValueError(f"column {i} out of range 1..{self.n_cols}")
        return self._marks[i - 1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Grid):
            return NotImplemented
        return self.shape == other.shape and bool(
            np.array_equal(self._marks, other._marks)
        )

    def __hash__(self) -> int:
        return hash((self.shape, self._marks.tobytes()))

    def __repr__(self) -> str:
        return f"Grid({self.n_cols}x{self.m_rows}, {int(self._marks.sum())} marks)"


def empty_grid(n_cols: int, m_rows: int) -> Grid:
    """All-blank grid of the requested shape."""
    if n_cols < 1 or m_rows < 1:
        raise ShapeError(f"dimensions must be positive, got {n_cols}x{m_rows}")
    return Grid(np.zeros((n_cols, m_rows), dtype=bool))


def grid_from_index(digits: Sequence[int], m_rows: int) -> Grid:
    """Grid of the function named by its base-(m_rows+1) index digits.

    Digit j > 0 puts the column's single mark at row j; digit 0 leaves the
    column blank (argument undefined).
    """
    if m_rows < 1:
        raise ShapeError(f"m_rows must be positive, got {m_rows}")
    digits = tuple(int(d) for d in digits)
    if len(digits) < 1:
        raise ValueError("index needs at least one digit")
    marks = np.zeros((len(digits), m_rows), dtype=bool)
    for i, d in enumerate(digits):
        if not 0 <= d <= m_rows:
            raise ValueError(f"digit {d} at position {i + 1} out of range 0..{m_rows}")
        if d > 0:
            marks[i, d - 1] = True
    return Grid(marks)


def index_from_grid(g: Grid) -> tuple[int, ...]:
    """Index digits of a function grid; inverse of grid_from_index."""
    counts = g.marks.sum(axis=1)
    if (counts > 1).any():
        bad = int(np.argmax(counts > 1)) + 1
        raise NotAFunctionError(f"column {bad} has {int(counts[bad - 1])} marks")
    # argmax of an all-False column is 0, masked away by the count check
    rows = g.marks.argmax(axis=1) + 1
    return tuple(int(r) if c == 1 else 0 for r, c in zip(rows, counts))


def is_function(g: Grid) -> bool:
    """True iff every column has at most one mark."""
    return bool((g.marks.sum(axis=1) <= 1).all())


def is_total(g: Grid) -> bool:
    """True iff every column has exactly one mark."""
    return bool((g.marks.sum(axis=1) == 1).all())


def evaluate(g: Grid, arg: int) -> int | None:
    """Value position of a function grid at 1-based argument ``arg``.

    Returns None when the function is undefined there (blank column).
    """
    if not 1 <= arg <= g.n_cols:
        raise ValueError(f"argument {arg} out of range 1..{g.n_cols}")
    col = g.marks[arg - 1]
    n = int(col.sum())
    if n > 1:
        raise NotAFunctionError(f"column {arg} has {n} marks")
    if n == 0:
        return None
    return int(col.argmax()) + 1


def value_sets(g: Grid) -> tuple[frozenset[int], ...]:
    """Per column, the set of 1-based rows carrying a mark."""
    return tuple(
        frozenset(int(j) + 1 for j in np.flatnonzero(col)) for col in g.marks
    )


def determinate_arguments(g: Grid) -> frozenset[int]:
    """Columns (1-based) with exactly one mark."""
    return frozenset(int(i) + 1 for i in np.flatnonzero(g.marks.sum(axis=1) == 1))


def contained_total_functions(g: Grid) -> int:
    """Number of total functions contained in the grid.

    One per path taking some marked value in every column, i.e. the product
    of the column cardinalities; any blank column forces 0.
    """
    counts = g.marks.sum(axis=1)
    if (counts == 0).any():
        return 0
    return int(math.prod(int(c) for c in counts))


def count_all_functions(n_cols: int, m_rows: int) -> int:
    """(m_rows + 1) ** n_cols, the number of total and partial functions.

    Raises OverflowError when the count does not fit a 64-bit integer.
    """
    if n_cols < 1 or m_rows < 1:
        raise ShapeError(f"dimensions must be positive, got {n_cols}x{m_rows}")
    count = (m_rows + 1) ** n_cols
    if count > _MAX_FUNCTION_COUNT:
        raise OverflowError(
            f"(m+1)^n = {m_rows + 1}^{n_cols} exceeds the 64-bit range"
        )
    return count


def all_function_grids(n_cols: int, m_rows: int) -> Iterator[Grid]:
    """Yield every function grid of the given shape, in index order."""
    count_all_functions(n_cols, m_rows)  # shape + range check
    base = m_rows + 1
    digits = [0] * n_cols
    while True:
        yield grid_from_index(digits, m_rows)
        i = n_cols - 1
        while i >= 0 and digits[i] == base - 1:
            digits[i] = 0
            i -= 1
        if i < 0:
            return
        digits[i] += 1


# -- text format --------------------------------------------------------
#
# Header line "#dtm-grid v1 n=<n_cols> m=<m_rows>", then m_rows lines of
# n_cols characters from {".", "X"}. Row m_rows prints first (top), row 1
# last, matching the bottom-up value axis of the table reading.


def grid_to_text(g: Grid) -> str:
    lines = [f"{TEXT_MAGIC} v1 n={g.n_cols} m={g.m_rows}"]
    for j in range(g.m_rows, 0, -1):
        lines.append("".join("X" if g.marks[i, j - 1] else "." for i in range(g.n_cols)))
    return "\n".join(lines) + "\n"


def _parse_header(line: str, magic: str, line_no: int = 1) -> dict[str, str]:
    parts = line.split()
    if len(parts) < 2 or parts[0] != magic:
        raise ParseError(f"expected header starting with '{magic} v1'", line_no)
    if parts[1] != "v1":
        raise ParseError(f"unknown format version {parts[1]!r}", line_no)
    fields: dict[str, str] = {}
    for part in parts[2:]:
        key, sep, value = part.partition("=")
        if not sep or not key:
            raise ParseError(f"malformed header field {part!r}", line_no)
        fields[key] = value
    return fields


def _parse_int_field(fields: dict[str, str], key: str, line_no: int = 1) -> int:
    if key not in fields:
        raise ParseError(f"header is missing the {key}= field", line_no)
    try:
        return int(fields[key])
    except ValueError:
        raise ParseError(f"header field {key}={fields[key]!r} is not an integer",
                         line_no) from None


def _parse_body(lines: list[str], n_cols: int, m_rows: int,
                first_line_no: int) -> np.ndarray:
    """Parse m_rows mark lines (top row first) into an (n_cols, m_rows) matrix."""
    if len(lines) != m_rows:
        raise ParseError(f"expected {m_rows} mark rows, found {len(lines)}",
                         first_line_no + len(lines))
    marks = np.zeros((n_cols, m_rows), dtype=bool)
    for offset, line in enumerate(lines):
        line_no = first_line_no + offset
        if len(line) != n_cols:
            raise ParseError(
                f"expected {n_cols} characters, found {len(line)}", line_no)
        j = m_rows - offset  # top line is row m_rows
        for i, ch in enumerate(line):
            if ch == "X":
                marks[i, j - 1] = True
            elif ch != ".":
                raise ParseError(f"invalid character {ch!r} (expected '.' or 'X')",
                                 line_no)
    return marks


def grid_from_text(text: str) -> Grid:
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty grid text", 1)
    fields = _parse_header(lines[0], TEXT_MAGIC)
    n = _parse_int_field(fields, "n")
    m = _parse_int_field(fields, "m")
    if n < 1 or m < 1:
        raise ParseError(f"dimensions must be positive, got n={n} m={m}", 1)
    body = [line for line in lines[1:] if line.strip()]
    return Grid(_parse_body(body, n, m, first_line_no=2))


def load_grid(path) -> Grid:
    with open(path, encoding="utf-8") as fh:
        return grid_from_text(fh.read())


def save_grid(g: Grid, path) -> None:
    from ._files import atomic_write_text

    atomic_write_text(path, grid_to_text(g))
