"""Exception hierarchy shared by every module."""


class PrgError(Exception):
    """Base class for all library errors."""


class InvalidVertex(PrgError, IndexError):
    pass


class InvalidEdge(PrgError, ValueError):
    pass


class InvalidTuple(PrgError, ValueError):
    pass


class InvalidArity(PrgError, ValueError):
    pass


class InvalidParameter(PrgError, ValueError):
    pass


class SizeUnsupported(PrgError, ValueError):
    pass


class BudgetExceeded(PrgError, RuntimeError):
    """Raised when an exact computation would exceed its configured work budget."""


class DegenerateDensity(PrgError, ValueError):
    """Empty or complete graph: the edge density carries no information about p."""


class PreconditionFailed(PrgError, ValueError):
    """A stated hypothesis or chain precondition does not hold.

    ``index`` carries the first offending position when one exists.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class GraphFormatError(PrgError, ValueError):
    """Corrupt or truncated graph file."""
