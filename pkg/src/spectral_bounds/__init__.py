"""Lower bounds for sums of Dirichlet eigenvalues of the poly-Laplacian and
of ``Delta^2 - a Delta``, with the extremal-profile machinery behind them and
true spectra to check them against."""

from . import bounds, extremal, geometry, spectra
from .bounds import BoundResult, ProblemSpec
from .errors import (BelowThreshold, DegenerateDomain, InfeasibleMoment, InvalidArgument,
                     NotApplicable, NumericalBreakdown, OutOfRange, SpectralBoundsError)
from .geometry import Domain, invariants, unit_ball_volume

__version__ = "0.1.0"
