"""Shared exception types."""


class IdealSieveError(Exception):
    """Base class for package errors."""


class UnsupportedFieldError(IdealSieveError):
    """Raised for fields outside the vetted monogenic list, or for
    operations that require a finite unit group on a field without one."""


class BudgetExceededError(IdealSieveError):
    """Raised when an enumeration or factorization would exceed its budget."""


class ReduciblePolynomialError(IdealSieveError):
    """Raised when a defining polynomial is not irreducible over Q."""
