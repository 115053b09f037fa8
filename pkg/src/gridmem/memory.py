"""Associative memory registers and banks.

A register is a grid playing the memory role plus the class labels it
stores. Registers are immutable snapshots: writing produces a new value,
so any number of readers can query a register while a single owner decides
when to swap in an updated one.
"""

from __future__ import annotations

import re
from typing import NamedTuple

from .errors import ParseError, ShapeError
from .grids import Grid, _parse_body, _parse_header, _parse_int_field, empty_grid
from .ops import abstraction, inclusion_test, reduction

MEMORY_MAGIC = "#dtm-memory"

_LABEL_RE = re.compile(r"[^\s,=]+")


class MemoryRegister:
    """One associative memory: a content grid tagged with its labels."""

    __slots__ = ("_content", "_labels")

    def __init__(self, content: Grid, labels):
        labels = frozenset(str(l) for l in labels)
        if not labels:
            raise ValueError("a register needs at least one label")
        self._content = content
        self._labels = labels

    @classmethod
    def blank(cls, labels, n_cols: int, m_rows: int) -> "MemoryRegister":
        return cls(empty_grid(n_cols, m_rows), labels)

    @property
    def content(self) -> Grid:
        return self._content

    @property
    def labels(self) -> frozenset[str]:
        return self._labels

    def __eq__(self, other):
        if not isinstance(other, MemoryRegister):
            return NotImplemented
        return self._labels == other._labels and self._content == other._content

    def __hash__(self):
        return hash((self._labels, self._content))

    def __repr__(self):
        return f"MemoryRegister(labels={sorted(self._labels)}, {self._content!r})"


class RetrievalOutcome(NamedTuple):
    accepted: bool
    output: Grid       # the buffer after the operation (blank when rejected)
    new_content: Grid  # register content after the operation


def register_cue(reg: MemoryRegister, cue: Grid) -> MemoryRegister:
    """Write a cue into the register by superposition."""
    new_content = abstraction(reg.content, cue).phi
    return MemoryRegister(new_content, reg.labels)


def recognize(reg: MemoryRegister, cue: Grid) -> bool:
    """Inclusion of the cue in the register content; the register is unchanged."""
    return inclusion_test(reg.content, cue)


def retrieve(reg: MemoryRegister, cue: Grid) -> RetrievalOutcome:
    """Take the cue out of memory, then write it back in.

    On a failed inclusion the buffer comes back blank and the content is
    untouched. On success the new content is the reduction of the content
    by the cue re-superposed with the cue, and the whole of it is copied
    to the output buffer (contents are selected by the cue, not trimmed
    to it).
    """
    if not recognize(reg, cue):
        return RetrievalOutcome(False, empty_grid(cue.n_cols, cue.m_rows),
                                reg.content)
    reduced = reduction(reg.content, cue).phi
    new_content = abstraction(reduced, cue).phi
    return RetrievalOutcome(True, new_content, new_content)


class RegisterBank:
    """Parallel array of same-shape registers with disjoint labels."""

    def __init__(self, registers):
        regs = tuple(registers)
        if not regs:
            raise ValueError("a bank needs at least one register")
        shape = regs[0].content.shape
        seen: dict[str, int] = {}
        for pos, reg in enumerate(regs):
            if reg.content.shape != shape:
                raise ShapeError(
                    f"register {pos} has shape {reg.content.shape}, expected {shape}"
                )
            for label in reg.labels:
                if label in seen:
                    raise ValueError(f"label {label!r} appears in two registers")
                seen[label] = pos
        self._registers = regs
        self._by_label = seen

    @property
    def registers(self) -> tuple[MemoryRegister, ...]:
        return self._registers

    @property
    def n_cols(self) -> int:
        return self._registers[0].content.n_cols

    @property
    def m_rows(self) -> int:
        return self._registers[0].content.m_rows

    @property
    def labels(self) -> frozenset[str]:
        return frozenset(self._by_label)

    def register_for(self, label) -> MemoryRegister:
        return self._registers[self._by_label[str(label)]]

    def __len__(self):
        return len(self._registers)

    def __iter__(self):
        return iter(self._registers)


def bank_recognize(bank: RegisterBank, cue: Grid) -> dict[frozenset[str], bool]:
    """Submit one cue to every register; order of evaluation is immaterial."""
    return {reg.labels: recognize(reg, cue) for reg in bank}


# -- text format --------------------------------------------------------
#
# One register: "#dtm-memory v1 n=<n> m=<m> labels=<l1[,l2]>" followed by
# the grid body in the grid text layout. A bank file is registers
# concatenated with one blank line between them.


def _labels_field(labels: frozenset[str]) -> str:
    ordered = sorted(labels)
    for label in ordered:
        if not _LABEL_RE.fullmatch(label):
            raise ValueError(
                f"label {label!r} cannot be serialized (no spaces, commas or '=')"
            )
    return ",".join(ordered)


def register_to_text(reg: MemoryRegister) -> str:
    g = reg.content
    header = (f"{MEMORY_MAGIC} v1 n={g.n_cols} m={g.m_rows} "
              f"labels={_labels_field(reg.labels)}")
    body = "\n".join(
        "".join("X" if g.marks[i, j - 1] else "." for i in range(g.n_cols))
        for j in range(g.m_rows, 0, -1)
    )
    return f"{header}\n{body}\n"


def _register_from_lines(lines: list[str], first_line_no: int) -> MemoryRegister:
    fields = _parse_header(lines[0], MEMORY_MAGIC, first_line_no)
    n = _parse_int_field(fields, "n", first_line_no)
    m = _parse_int_field(fields, "m", first_line_no)
    if n < 1 or m < 1:
        raise ParseError(f"dimensions must be positive, got n={n} m={m}",
                         first_line_no)
    if "labels" not in fields or not fields["labels"]:
        raise ParseError("header is missing the labels= field", first_line_no)
    labels = fields["labels"].split(",")
    if any(not label for label in labels):
        raise ParseError(f"empty label in labels={fields['labels']!r}",
                         first_line_no)
    marks = _parse_body(lines[1:], n, m, first_line_no + 1)
    return MemoryRegister(Grid(marks), labels)


def register_from_text(text: str) -> MemoryRegister:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise ParseError("empty register text", 1)
    return _register_from_lines(lines, 1)


def bank_to_text(bank: RegisterBank) -> str:
    return "\n".join(register_to_text(reg) for reg in bank)


def bank_from_text(text: str) -> RegisterBank:
    blocks: list[tuple[int, list[str]]] = []
    current: list[str] = []
    start = 1
    for line_no, line in enumerate(text.splitlines(), start=1):
        if line.strip():
            if not current:
                start = line_no
            current.append(line)
        elif current:
            blocks.append((start, current))
            current = []
    if current:
        blocks.append((start, current))
    if not blocks:
        raise ParseError("no registers found", 1)
    return RegisterBank(
        _register_from_lines(lines, line_no) for line_no, lines in blocks
    )


def load_bank(path) -> RegisterBank:
    with open(path, encoding="utf-8") as fh:
        return bank_from_text(fh.read())


def save_bank(bank: RegisterBank, path) -> None:
    from ._files import atomic_write_text

    atomic_write_text(path, bank_to_text(bank))
