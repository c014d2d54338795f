"""Exception hierarchy shared by the library and the command line."""


class LevySmileError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(LevySmileError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class ArbitrageError(DomainError):
    """A quoted price violates the static no-arbitrage bounds."""


class UpperBoundError(DomainError):
    """A call quote is at or above the spot, which no martingale model produces."""


class NotApplicableError(DomainError):
    """The operation has no meaning for this model and strike (e.g. a zero slope)."""


class IntegrationError(LevySmileError, ArithmeticError):
    """Adaptive quadrature failed to reach tolerance.

    The partial estimate and its error bound are kept on the exception.
    """

    def __init__(self, message, estimate=float("nan"), error=float("inf")):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class NumericalError(LevySmileError, ArithmeticError):
    """A non-finite intermediate appeared in a numerical engine."""


class CapabilityError(LevySmileError, NotImplementedError):
    """The requested engine does not support the given model."""


class ConfigError(LevySmileError, ValueError):
    """A configuration document is malformed; the message names the offending key."""
