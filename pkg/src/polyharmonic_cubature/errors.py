"""Exception hierarchy shared by all modules."""


class CubatureError(Exception):
    """Base class for every error raised by this package."""


class InvalidSupport(CubatureError, ValueError):
    pass


class NonIntegrable(CubatureError, ArithmeticError):
    pass


class TooShort(CubatureError, ValueError):
    pass


class ZeroMeasure(CubatureError, ValueError):
    pass


class RankTooLow(CubatureError, ValueError):
    pass


class InsufficientSamples(CubatureError, ValueError):
    pass


class MissingMoment(CubatureError, KeyError):
    pass


class NotPseudoPositive(CubatureError, ValueError):
    """A harmonic component of a density dips below zero.

    ``index`` is the offending ``(k, l)`` pair and ``radius`` the sample
    radius where the violation was seen.
    """

    def __init__(self, index, radius, value):
        self.index = index
        self.radius = radius
        self.value = value
        super().__init__(
            f"component {index} is negative ({value:.3e}) at r={radius:.6g}")


class NoConvergence(CubatureError, ArithmeticError):
    def __init__(self, message, residual=float("nan")):
        self.residual = residual
        super().__init__(message)


class NonPositiveWeight(NoConvergence):
    pass


class NodeEscape(NoConvergence):
    pass


class MissingDerivativeBound(CubatureError, KeyError):
    pass


class OrderTooHigh(CubatureError, ValueError):
    pass


class InvalidRadii(CubatureError, ValueError):
    pass


class WeakTplusWarning(UserWarning):
    """The numerical T+ certificate failed for an annulus basis."""
