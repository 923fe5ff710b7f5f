"""Exception types raised by the numerical routines."""


class NumericalError(ArithmeticError):
    """Base class for numerical failures (exit code 3 in the CLI)."""


class PivotError(NumericalError):
    """An LDL pivot was nonpositive (or zero, for indefinite factorizations)."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ConvergenceError(NumericalError):
    """An eigensolver exceeded its iteration cap."""


class FunctionDomainError(NumericalError):
    """A scalar function was undefined or non-finite at an eigenvalue."""


class BreakdownError(NumericalError):
    """The Krylov space was exhausted before the requested iteration."""
