"""Exception hierarchy shared by all bessel_heat modules."""


class BesselHeatError(Exception):
    """Base class for every error raised by this package."""


class DomainError(BesselHeatError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class PoleError(DomainError):
    """The requested value sits on a pole (for example I_nu at 0 for nu < 0)."""


class IllConditionedError(BesselHeatError, ArithmeticError):
    """The computation was refused because cancellation would destroy accuracy.

    Raised by the spectral series when lambda_1^2 * t falls below the
    configured floor.  Callers that want a value anyway must lower the floor
    explicitly and accept the loss of certified accuracy.
    """


class IterationError(BesselHeatError, RuntimeError):
    """An iterative solver failed to converge within its budget."""


class ConfigurationError(BesselHeatError, ValueError):
    """A simulation or scan configuration is inconsistent."""
