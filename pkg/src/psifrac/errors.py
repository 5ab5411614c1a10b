"""Exception hierarchy shared by every module of the package."""


class PsiFracError(Exception):
    """Base class for all errors raised by :mod:`psifrac`."""


class DomainError(PsiFracError, ValueError):
    """An interval leaves the natural domain of a weight function."""


class ParamError(PsiFracError, ValueError):
    """A parameter violates its constraint (monotonicity, order, exponent)."""


class RangeError(PsiFracError, ValueError):
    """A value lies outside the range where an inverse is defined."""


class OrderError(PsiFracError, ValueError):
    """A derivative of higher order than the function provides was requested."""


class NonConvergence(PsiFracError, RuntimeError):
    """Adaptive quadrature hit its subdivision limit before reaching tolerance."""


class EvalError(PsiFracError, FloatingPointError):
    """An integrand or norm argument evaluated to NaN or infinity."""


class RegimeError(PsiFracError, ValueError):
    """The fractional order does not satisfy the hypothesis of a norm regime."""


class HypothesisError(PsiFracError, ValueError):
    """A function fails a structural hypothesis (derivative bound, flatness)."""
