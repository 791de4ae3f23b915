"""Exception hierarchy shared by all engines."""


class RingSpecError(Exception):
    """Base class for library errors."""


class DomainError(RingSpecError, ValueError):
    """An argument lies outside the domain of the requested function."""


class DegeneracyError(RingSpecError, ArithmeticError):
    """A numerical object that must be positive (definite) is not.

    Raised for non-conformal maps (``Sigma <= 0``), failed Cholesky
    factorizations and non-positive expectation values.
    """


class AccuracyError(RingSpecError, ArithmeticError):
    """A quadrature or fit did not reach its convergence target."""


class StateError(RingSpecError, RuntimeError):
    """An operation needs data that the object was built without."""
