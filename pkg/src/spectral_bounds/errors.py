"""Exception hierarchy shared by every module."""


class SpectralBoundsError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgument(SpectralBoundsError, ValueError):
    pass


class DegenerateDomain(InvalidArgument):
    pass


class NotApplicable(SpectralBoundsError):
    """A bound was requested outside the dimensions/operators it is proved for."""


class OutOfRange(SpectralBoundsError, ValueError):
    pass


class BelowThreshold(OutOfRange):
    pass


class InfeasibleMoment(SpectralBoundsError, ValueError):
    pass


class NumericalBreakdown(SpectralBoundsError, ArithmeticError):
    pass


class BinomialOverflow(SpectralBoundsError, OverflowError):
    pass
