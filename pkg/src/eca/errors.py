"""Exception types raised across the package.

The CLI maps these onto exit codes: data problems exit with 2, numeric
failures with 3.
"""


class ECAError(Exception):
    """Base class for package errors."""


class DataError(ECAError, ValueError):
    """Input data is malformed or degenerate."""


class DegeneratePairError(DataError):
    """Two observations coincide, so their Kendall kernel is undefined."""

    def __init__(self, i: int, j: int):
        self.pair = (i, j)
        super().__init__(f"rows {i} and {j} are identical; kernel undefined")


class ParseError(DataError):
    """A CSV file could not be read as a numeric matrix."""


class NumericError(ECAError, ArithmeticError):
    """A numerical routine failed (non-finite values, dead iterates, ...)."""


class CombinatorialBlowupError(NumericError):
    """Exhaustive support search would exceed the subset budget."""


class InitializationError(NumericError):
    """The Fantope-based starting vector could not be formed."""


class DeadIterateError(NumericError):
    """Power iteration produced a zero vector."""
