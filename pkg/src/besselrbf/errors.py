"""Exception and warning types shared across the package."""


class BesselRBFError(Exception):
    """Base class for all package errors."""


class DivergenceError(BesselRBFError, ArithmeticError):
    """A Bessel function or kernel was requested at a singular point."""


class ConvergenceError(BesselRBFError, ArithmeticError):
    """An iterative refinement did not reach its tolerance."""


class NumericalFailure(BesselRBFError, ArithmeticError):
    """A non-finite value appeared in a reduction."""


class OutsideConeError(BesselRBFError, ValueError):
    """A space-time distance was requested outside the closed forward cone."""


class EmptyDomainError(BesselRBFError, ValueError):
    """The causal cone does not meet the requested integration box."""


class MissingZerothTermError(BesselRBFError, ValueError):
    """As-printed reconstruction needs the x-dependent zeroth term."""


class DegenerateCalibrationError(BesselRBFError, ArithmeticError):
    """The reconstruction used for calibration is numerically zero."""


class ConfigError(BesselRBFError, ValueError):
    """Invalid or incomplete run configuration."""


class NonDecayingWarning(RuntimeWarning):
    """The integrand does not decay towards the truncation radius."""


class NodeCollisionWarning(RuntimeWarning):
    """Quadrature nodes landed on the singularity of a kernel and were skipped."""


class RankDeficiencyWarning(RuntimeWarning):
    """Singular values were discarded in a least-squares projection."""
