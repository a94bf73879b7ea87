"""Exception types raised by the toolkit."""


class NWSpecError(Exception):
    """Base class for all toolkit errors."""


class DomainTagError(NWSpecError):
    """A phase-space function was passed in the wrong domain (direct vs Fourier)."""


class GridMismatchError(NWSpecError):
    """Two objects that must share a grid do not."""


class DimensionError(NWSpecError):
    """Vectors or matrices have incompatible dimensions."""


class ResolutionError(NWSpecError):
    """A state or evaluation point is not resolved by the grid."""


class AliasingError(NWSpecError):
    """An inverse Weyl reconstruction leaks mass outside the grid box."""

    def __init__(self, message, leakage):
        super().__init__(message)
        self.leakage = leakage


class NormalizationError(NWSpecError):
    """A phase-space function fails the F^(0) = 1 precheck."""


class ConfigError(NWSpecError):
    """Experiment configuration could not be parsed or validated."""


class InconsistencyError(NWSpecError):
    """The two spectrum testers returned contradictory verdicts."""
