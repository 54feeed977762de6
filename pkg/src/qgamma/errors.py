"""Exception types raised by qgamma."""


class QGammaError(Exception):
    """Base class for all library errors."""


class NonHermitian(QGammaError, ValueError):
    pass


class NotPositive(QGammaError, ValueError):
    """An element expected to be positive semidefinite has a negative eigenvalue."""


class ShapeMismatch(QGammaError, ValueError):
    pass


class LengthMismatch(QGammaError, ValueError):
    pass


class GammaOutOfRange(QGammaError, ValueError):
    pass


class GammaMismatch(QGammaError, ValueError):
    """Two gamma-coordinates are not dual (their gammas do not sum to one)."""


class Infeasible(QGammaError):
    """The constraint set has empty intersection with the positive cone."""


class SamplingFailed(QGammaError):
    pass


class MaxIterationsWarning(RuntimeWarning):
    """An iterative solver stopped at its iteration cap before converging."""
