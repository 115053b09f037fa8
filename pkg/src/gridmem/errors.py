"""Exception types shared across the package.

Everything subclasses ValueError so callers that only know the standard
library can still catch failures the usual way.
"""


class ShapeError(ValueError):
    """Grid dimensions are invalid, or two grids disagree in shape."""


class NotAFunctionError(ValueError):
    """A grid with more than one mark in some column was used where a
    function grid is required."""


class ParseError(ValueError):
    """A text artifact (grid, memory, feature file, ...) is malformed.

    ``line`` is the 1-based line number when the failure is attributable
    to a single line, else None.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class StratificationError(ValueError):
    """A label has too few records for the requested number of folds."""


class PairingError(ValueError):
    """A label pairing does not cover the labels present in the data."""
