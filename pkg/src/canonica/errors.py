"""Exception hierarchy shared by all canonica modules."""


class CanonicaError(Exception):
    """Base class for every error raised by canonica."""


class GridMismatchError(CanonicaError, ValueError):
    """Two signals that must share a time grid do not."""


class ParameterError(CanonicaError, ValueError):
    """A transform or constructor parameter violates its contract."""


class AlignmentError(ParameterError):
    """A shift or frequency does not fall on the grid it must live on."""


class AdmissibilityError(ParameterError):
    """A sampling set fails its admissibility condition."""


class SolverError(CanonicaError, RuntimeError):
    """Every restart of the phase-retrieval solver failed.

    The best partial result seen so far, if any, is kept on ``best``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
