"""Cell- and column-wise operations on grid pairs, and the entropy measure.

The pair view: ``phi`` is the retained/memory grid, ``psi`` the in/out
buffer grid. All operations are pure; the buffer-clearing conventions of
the underlying machine show up as fresh values in the returned pair, never
as mutation.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import ShapeError
from .grids import Grid, empty_grid


class GridPair(NamedTuple):
    phi: Grid
    psi: Grid


def _check_same_shape(phi: Grid, psi: Grid) -> None:
    if phi.shape != psi.shape:
        raise ShapeError(
            f"grid shapes differ: {phi.n_cols}x{phi.m_rows} vs {psi.n_cols}x{psi.m_rows}"
        )


def abstraction(phi: Grid, psi: Grid) -> GridPair:
    """Superpose ``psi`` onto ``phi``: cell-wise OR, buffer cleared.

    Commutative, associative and idempotent on the phi side, with the blank
    grid as identity.
    """
    _check_same_shape(phi, psi)
    return GridPair(Grid(phi.marks | psi.marks), empty_grid(phi.n_cols, phi.m_rows))


def inclusion_test(phi: Grid, psi: Grid) -> bool:
    """True iff every mark of ``psi`` is marked in ``phi``.

    Cell-wise material implication psi -> phi. Pure predicate: the failure
    convention of clearing the buffer is the memory layer's business.
    """
    _check_same_shape(phi, psi)
    return bool((phi.marks | ~psi.marks).all())


def reduction(phi: Grid, psi: Grid) -> GridPair:
    """Extract ``psi`` out of ``phi`` column by column.

    A column equal in both grids is left untouched on both sides (it cannot
    be told apart from one psi built alone, so nothing is removed). Any
    other column becomes the set difference phi - psi on the phi side, while
    the psi side receives the pre-operation phi column.

    Callers are expected to have checked inclusion_test first; this function
    applies the column rule unconditionally.
    """
    _check_same_shape(phi, psi)
    equal = (phi.marks == psi.marks).all(axis=1)[:, None]
    new_phi = np.where(equal, phi.marks, phi.marks & ~psi.marks)
    new_psi = np.where(equal, psi.marks, phi.marks)
    return GridPair(Grid(new_phi), Grid(new_psi))


def entropy(g: Grid) -> float:
    """Mean over columns of log2 of the column's mark count, in bits.

    Blank columns contribute 0, so function grids (total or partial) have
    entropy exactly 0. Bounded by log2(m_rows).
    """
    counts = g.marks.sum(axis=1)
    return float(np.log2(np.maximum(counts, 1)).mean())
