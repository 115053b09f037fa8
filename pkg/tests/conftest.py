import numpy as np
import pytest

from gridmem import Grid


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_grid(rng, n_cols, m_rows, density=0.3) -> Grid:
    return Grid(rng.random((n_cols, m_rows)) < density)


def random_function_grid(rng, n_cols, m_rows, total=False) -> Grid:
    """Function grid from random index digits (0 allowed unless total)."""
    low = 1 if total else 0
    marks = np.zeros((n_cols, m_rows), dtype=bool)
    digits = rng.integers(low, m_rows + 1, size=n_cols)
    for i, d in enumerate(digits):
        if d > 0:
            marks[i, d - 1] = True
    return Grid(marks)
