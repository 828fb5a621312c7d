"""Exception types shared across the package."""


class ExpanderError(Exception):
    """Base class for all errors raised by this package."""


class PreconditionError(ExpanderError, ValueError):
    """Input parameters violate an operation's requirements."""


class DegreeError(PreconditionError):
    """A graph is not regular of the declared degree."""

    def __init__(self, vertex, degree, expected):
        self.vertex = vertex
        self.degree = degree
        self.expected = expected
        super().__init__(f"vertex {vertex} has degree {degree}, expected {expected}")


class GraphFormatError(PreconditionError):
    """An edge-list file could not be parsed."""


class ConstructionError(ExpanderError, RuntimeError):
    """An internal consistency check failed while building a graph.

    This signals a bug (or a wrong parameter class that slipped past the
    precondition checks), never a user error.
    """


class HypothesisError(ExpanderError):
    """The sparse-neighbourhood hypothesis does not hold for a graph."""

    def __init__(self, message, witness=None, rank=None):
        self.witness = witness
        self.rank = rank
        super().__init__(message)


class SparseSetError(ExpanderError):
    """Not enough well-separated tree-like vertices could be found."""

    def __init__(self, message, achieved=None):
        self.achieved = achieved
        super().__init__(message)


class ConvergenceError(ExpanderError, ArithmeticError):
    """The iterative eigensolver hit its iteration cap."""

    def __init__(self, message, estimate=None, residual=None, iterations=None):
        self.estimate = estimate
        self.residual = residual
        self.iterations = iterations
        super().__init__(message)
