"""Exception types shared across the package.

Each error carries an ``exit_code`` used by the command-line front end.
"""
from __future__ import annotations


class ResolvexError(Exception):
    exit_code = 65


class ParseError(ResolvexError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class AlphabetMismatch(ResolvexError):
    pass


class DegreeCapExceeded(ResolvexError):
    pass


class NotUnambiguous(ResolvexError):
    pass


class NotPositivelyResolvable(ResolvexError):
    exit_code = 1


class InfiniteAmbiguity(ResolvexError):
    exit_code = 2


class StateBudgetExceeded(ResolvexError):
    exit_code = 70


class NotUnary(ResolvexError):
    pass


class NotStochastic(ResolvexError):
    pass


class PeriodTooLarge(ResolvexError):
    exit_code = 70


class NumericalFailure(ResolvexError):
    exit_code = 2


class GeneratorError(ResolvexError):
    exit_code = 64


class CapTooSmall(UserWarning):
    """Emitted when a search frontier was cut off by a length cap."""
