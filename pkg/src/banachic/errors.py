"""Exception hierarchy shared by all modules."""


class BanachicError(Exception):
    """Base class for errors raised by this package."""


class DomainError(BanachicError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DegeneracyError(BanachicError, ValueError):
    """A linear system that must be nonsingular is (numerically) singular."""

    def __init__(self, message, offending=()):
        super().__init__(message)
        self.offending = tuple(offending)


class ConfigurationError(BanachicError, ValueError):
    """Two objects that must share a configuration do not."""


class IntegrandError(BanachicError, ArithmeticError):
    """An integrand returned a non-finite value."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class ConvergenceError(BanachicError, RuntimeError):
    """An iterative solver stopped before reaching its tolerance.

    The best iterate found so far and its residual are kept on the exception
    so callers can still report diagnostics.
    """

    def __init__(self, message, best=None, residual=float("nan"), iterations=0):
        super().__init__(message)
        self.best = best
        self.residual = residual
        self.iterations = iterations
