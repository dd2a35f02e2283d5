"""Exception hierarchy shared by every module of the package."""


class ConvexityRadiiError(Exception):
    """Base class for all errors raised by this package."""


class ParameterRangeError(ConvexityRadiiError, ValueError):
    """A family parameter, normalization or order lies outside its admissible range."""


class ParameterPole(ConvexityRadiiError, ValueError):
    """The series parameters hit a pole of the Pochhammer denominators."""


class DomainError(ConvexityRadiiError, ValueError):
    """The argument lies outside the domain where the requested value is defined."""


class NonConvergence(ConvexityRadiiError, ArithmeticError):
    """A series or an iteration did not converge within its cap."""


class NearPole(ConvexityRadiiError, ArithmeticError):
    """A ratio denominator is too close to zero to be trusted."""


class ScanExhausted(ConvexityRadiiError, ArithmeticError):
    """The zero scan window holds fewer sign changes than requested."""


class BracketFailure(ConvexityRadiiError, ArithmeticError):
    """An interval expected to hold exactly one zero does not."""


class NoSignChange(ConvexityRadiiError, ArithmeticError):
    """The curvature does not cross the requested order inside the search interval."""


class QuadratureFailure(ConvexityRadiiError, ArithmeticError):
    """Adaptive quadrature reached its depth limit before meeting the tolerance."""


class CertificationFailure(ConvexityRadiiError, ArithmeticError):
    """Disk sampling found a boundary point violating the radius claim."""

    def __init__(self, message: str, theta: float | None = None):
        super().__init__(message)
        self.theta = theta
