"""Exception and warning types shared across the package."""


class RisboundError(Exception):
    """Base class for every error raised by this package."""


class SingularResolvent(RisboundError):
    """The load-terminated network equation is singular or too ill-conditioned."""


class SingularUpdate(RisboundError):
    """A low-rank update system is singular; evaluate the configuration directly."""


class InvalidNoise(RisboundError):
    """Noise power must be strictly positive."""


class TooLarge(RisboundError):
    """Problem size exceeds the configured enumeration cap."""


class GaugeError(RisboundError):
    """Base class for inadmissible reparametrizations."""


class ZeroGaugeEntry(GaugeError):
    """A diagonal-similarity entry or the scaling factor is zero."""


class NonContractiveM(GaugeError):
    """The disc-automorphism parameter must satisfy |m| < 1."""


class ForbiddenPole(GaugeError):
    """A load value coincides with the pole of the disc automorphism."""


class IllConditionedMobius(GaugeError):
    """The matrix I - m*Gamma is too ill-conditioned to invert reliably."""


class NotUnitModulusLoads(RisboundError):
    """Both load states must lie on the unit circle for this bound."""


class NotContractive(RisboundError):
    """The coupling matrix must be strictly contractive for this bound."""


class ZeroMatrix(RisboundError):
    """The matrix is (numerically) zero where a nonzero one is required."""


class SolverNotConverged(RisboundError):
    """The conic solver failed; carries the last residuals when available."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = dict(residuals) if residuals else {}


class NumericalFailure(RisboundError):
    """Non-finite values appeared inside an iterative solver."""


class ParseError(RisboundError):
    """A model or configuration file is malformed."""


class DegenerateAchieverWarning(UserWarning):
    """The bound-achieving configuration is degenerate; identity returned."""


class DegenerateDenominatorWarning(UserWarning):
    """A per-element load recovery hit a zero denominator; element forced to 0."""
