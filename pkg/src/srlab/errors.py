"""Exception hierarchy shared by the numerical modules and the CLI.

Each class carries the process exit status the CLI reports for it.
"""


class SrlabError(Exception):
    """Base class for all library errors."""

    exit_status = 1


class ValidationError(SrlabError, ValueError):
    """Invalid parameters, ranges or preconditions."""

    exit_status = 2


class InvalidMeasurementError(ValidationError):
    """Intensity inputs that cannot come from a physical measurement."""


class NumericalConsistencyError(SrlabError, ArithmeticError):
    """A computed quantity left its admissible range beyond rounding."""

    exit_status = 3


class UndefinedBoundError(NumericalConsistencyError):
    """The speed-limit time is undefined because the path length vanishes."""


class InvariantViolationError(NumericalConsistencyError):
    """An integrated density matrix lost trace, hermiticity or positivity."""


class ConvergenceError(SrlabError, RuntimeError):
    """The step-halving convergence gate of the oracle failed."""

    exit_status = 4
