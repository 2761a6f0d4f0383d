"""Exception and warning types shared by all physics and I/O modules."""


class CavitySpdcError(Exception):
    """Base class for all errors raised by this package."""


class DispersionWindowError(CavitySpdcError):
    """A frequency falls outside the validity window of the dispersion model."""


class NotPhasematchableError(CavitySpdcError):
    """No crystal orientation satisfies collinear phasematching."""


class DivergenceError(CavitySpdcError):
    """A geometric sum or Airy expression diverges (unit reflectivity)."""


class UnsupportedConfigurationError(CavitySpdcError):
    """The requested quantity is only defined for a restricted geometry."""


class InfiniteWidthError(CavitySpdcError):
    """Cavity mode width is unbounded (zero coefficient of finesse)."""


class UnderResolvedError(CavitySpdcError):
    """A sampling grid is too coarse for the requested computation."""


class EmptyPeakSetError(CavitySpdcError):
    """Peak extraction found no peaks above the requested prominence."""


class InfeasibleDesignError(CavitySpdcError):
    """The source-design recipe cannot meet the requested target."""


class ConfigError(CavitySpdcError):
    """A run-configuration file is missing, malformed or inconsistent."""


class UnderResolutionWarning(UserWarning):
    """A grid resolves cavity modes with fewer than the recommended samples."""


class PhaseRelaxationWarning(UserWarning):
    """A resonance-phase condition had to be relaxed for lack of free phases."""
