"""Exception hierarchy.

Two branches matter for the CLI: ``ValidationError`` (bad input, exit code 1)
and ``NumericalError`` (a computation failed at runtime, exit code 2).
"""


class BreatherLabError(Exception):
    """Base class for all package errors."""


class ValidationError(BreatherLabError):
    """Input violates a documented precondition."""


class NumericalError(BreatherLabError):
    """A numerical procedure failed (non-convergence, degeneracy, ...)."""


class DomainError(ValidationError):
    """Argument outside the mathematical domain of a special function."""


class DimensionMismatchError(ValidationError):
    """Matrix or tensor-factor dimensions are incompatible."""


class StabilityError(NumericalError):
    """Time step violates the documented stability bound of the integrator."""


class ResonantSourceError(NumericalError):
    """A source term has resonant (diagonal) content: the wave operator is
    not invertible there and the result would grow secularly."""


class NonConvergenceError(NumericalError):
    """Iteration exhausted its budget without meeting the tolerance."""


class SingularJacobianError(NumericalError):
    """Newton system is numerically singular."""


class SmallDivisorError(NumericalError):
    """A non-resonant denominator fell below the documented floor."""


class NoPeriodicOrbitError(NumericalError):
    """Requested parameter regime admits no real periodic orbit."""


class LightConeError(NumericalError):
    """Traveling-wave reduction degenerates at velocity^2 = 1."""


class ZeroProbabilityError(NumericalError):
    """Conditioning event has probability below the documented floor."""
