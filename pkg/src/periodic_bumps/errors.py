"""Exception types raised across the package."""


class PeriodicBumpsError(Exception):
    """Base class for all package errors."""


class InvalidInputError(PeriodicBumpsError, ValueError):
    """Argument outside the documented domain (degenerate interval, T <= 0, ...)."""


class NumericalError(PeriodicBumpsError, ArithmeticError):
    """A non-finite value or a failed numerical refinement."""


class ContractViolation(PeriodicBumpsError, ValueError):
    """Precondition of an operation does not hold (non-Hermitian input, irregular solution)."""


class AdmissibilityError(PeriodicBumpsError, ValueError):
    """Connectivity kernel violates the admissibility assumptions (evenness, decay, positive mass)."""


class ZeroEigenvalueError(ContractViolation):
    """Eigenfunction reconstruction requested for an eigenvalue at zero."""


class InvalidBracketError(PeriodicBumpsError, ValueError):
    """No event change across the requested bracket."""
