"""Exception hierarchy shared by every module in the package."""

import numpy as np


class SmwError(Exception):
    """Base class for all errors raised by smwpinv."""


class DimensionError(SmwError, ValueError):
    """Operand shapes are incompatible."""


class PreconditionError(SmwError):
    """A formula's hypotheses were checked and found not to hold.

    ``residuals`` maps the name of each checked condition to the residual
    that was measured, so callers can report how badly it failed.
    """

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = dict(residuals or {})


class SingularSystemError(SmwError, np.linalg.LinAlgError):
    """A small inner system is numerically singular.

    For the structured solves in this package this cannot happen with
    sane inputs, so it almost always points at corrupted data.
    """

    def __init__(self, message, condition_number=None):
        super().__init__(message)
        self.condition_number = condition_number


class ConvergenceError(SmwError, np.linalg.LinAlgError):
    """The SVD driver failed to converge.

    ``unconverged`` is the LAPACK ``info`` value: the number of
    superdiagonals of the intermediate bidiagonal form that did not
    converge to zero.
    """

    def __init__(self, message, unconverged):
        super().__init__(message)
        self.unconverged = unconverged


class SearchExhaustedError(SmwError, RuntimeError):
    """Rejection sampling ran out of attempts without a qualifying draw."""

    def __init__(self, message, attempts):
        super().__init__(message)
        self.attempts = attempts


class ParseError(SmwError, ValueError):
    """A Matrix Market file could not be parsed."""

    def __init__(self, message, path=None, line=None):
        where = ""
        if path is not None:
            where = f"{path}:"
            if line is not None:
                where += f"{line}:"
            where += " "
        super().__init__(where + message)
        self.path = path
        self.line = line
