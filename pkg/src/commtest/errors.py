"""Exception and warning types raised across the package."""


class CommtestError(Exception):
    """Base class for all errors raised by commtest."""


class DegenerateMatrix(CommtestError, ValueError):
    """Off-diagonal weights have (numerically) zero variance."""


class NonSymmetric(CommtestError, ValueError):
    pass


class ConvergenceFailure(CommtestError, RuntimeError):
    """Tracy-Widom table failed its anchor validation."""


class OutOfRange(CommtestError, ValueError):
    pass


class InvalidModel(CommtestError, ValueError):
    pass


class IndivisibleSize(CommtestError, ValueError):
    pass


class ParseError(CommtestError, ValueError):
    pass


class ShapeError(CommtestError, ValueError):
    pass


class SymmetryError(CommtestError, ValueError):
    pass


class DuplicateEdge(CommtestError, ValueError):
    pass


class IndexOutOfRange(CommtestError, IndexError):
    pass


class OverflowSaturated(RuntimeWarning):
    """exp(t * w) was clamped because |t * w| exceeded the safe exponent."""


class IsolatedNode(RuntimeWarning):
    """A node has zero degree in a spectral-clustering Laplacian."""


class DataWarning(UserWarning):
    """Input data was coerced (symmetrized, diagonal zeroed) while loading."""
