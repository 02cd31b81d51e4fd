"""Exception types raised across the package."""


class SpinBosonError(Exception):
    """Base class for all package errors."""


class CapacityError(SpinBosonError):
    """A requested size exceeds a configured hard cap."""


class ValidationError(SpinBosonError, ValueError):
    """Inputs violate a physical or structural constraint."""


class UnsupportedVariantError(SpinBosonError, TypeError):
    """An operation was called with a coupling or bath variant it does not handle."""


class InvalidStateError(ValidationError):
    """A density matrix failed the Hermiticity / trace / positivity checks.

    Attributes
    ----------
    min_eigenvalue : float or None
        Smallest eigenvalue found, when the failure was a positivity check.
    """

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class IntegrationError(SpinBosonError, ArithmeticError):
    """Adaptive quadrature failed to converge or the integral diverges."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
