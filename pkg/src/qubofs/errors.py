"""Exception types shared across the package."""


class QubofsError(Exception):
    """Base class for errors raised by qubofs."""


class CsvFormatError(QubofsError):
    """A CSV input could not be parsed into a dataset."""


class CovarianceError(QubofsError):
    """A synthetic covariance matrix is not positive semidefinite."""


class EnumerationLimitError(QubofsError):
    """Exhaustive enumeration was requested for too many variables."""


class UnreachableKError(QubofsError):
    """The bisection bracket collapsed without hitting the requested size.

    Carries the probe ``trace`` (tuple of ``(alpha, size)`` pairs) plus the
    probes that ended up bracketing the requested size from below and above,
    so callers can see where the subset-size staircase jumps past ``k``.
    """

    def __init__(self, message, trace, lower=None, upper=None):
        super().__init__(message)
        self.trace = tuple(trace)
        self.lower = lower
        self.upper = upper


class NonMonotoneTraceError(QubofsError):
    """A heuristic solver returned subset sizes that shrink as alpha grows.

    The bisection relies on the optimal subset size being nondecreasing in
    alpha; a violation means the solver missed the optimum at one or more
    probes. Callers should retry with more shots or the exhaustive solver.
    """

    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = tuple(trace)
