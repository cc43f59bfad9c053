"""Exception hierarchy shared by all modules."""


class TrapError(Exception):
    """Base class for every error raised by this package."""


class DomainError(TrapError, ValueError):
    """An argument lies outside the domain of an operation."""


class ContractError(TrapError, ValueError):
    """An input violates a stated contract (e.g. normalisation)."""


class ConfigurationError(TrapError, ValueError):
    """Invalid user configuration or numerical settings."""


class NumericalError(TrapError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance."""

    def __init__(self, message, error_estimate=None):
        super().__init__(message)
        self.error_estimate = error_estimate


class QuadratureError(NumericalError):
    """A Bessel-kernel quadrature did not converge."""


class RegimeError(TrapError, ValueError):
    """The requested quantity is undefined in the current physical regime.

    ``regime`` carries the offending regime (a string or an enum member).
    """

    def __init__(self, message, regime):
        super().__init__(message)
        self.regime = regime


class NoSolutionError(TrapError, ValueError):
    """A root-finding target is not bracketed."""


class AmbiguousError(TrapError, ValueError):
    """A bracket contains a non-monotone branch, so the root is not unique."""
