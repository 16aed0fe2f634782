"""Exception hierarchy shared by all gwlocal modules."""


class GWError(Exception):
    """Base class for every error raised by gwlocal."""


class MalformedEncoding(GWError, ValueError):
    """A degree sequence is not a valid Lukasiewicz word."""


class EmptySet(GWError, ValueError):
    pass


class NotALeaf(GWError, ValueError):
    pass


class EmptyLA(GWError, ValueError):
    """The tree has no vertex with out-degree in the requested set."""


class DomainError(GWError, ValueError):
    pass


class InvalidDistribution(GWError, ValueError):
    pass


class OutsideInterval(GWError, ValueError):
    """The tilt parameter does not give a probability distribution."""


class SeriesDivergence(GWError, ArithmeticError):
    pass


class Supercritical(GWError, ValueError):
    pass


class LatticeMiss(GWError, ValueError):
    """The requested size is not reachable on the span lattice."""


class ZeroMassEvent(GWError, ValueError):
    pass


class BudgetExceeded(GWError, RuntimeError):
    """A node, tree-count or truncation budget was hit.

    ``parameter`` names the limiting knob so callers (and the CLI) can tell
    the user what to raise.
    """

    def __init__(self, message, parameter=None):
        super().__init__(message)
        self.parameter = parameter


class RejectionBudgetExceeded(BudgetExceeded):
    pass


class InconsistentBudget(GWError, ValueError):
    """A node budget could bias a conditioned sampler, so it refuses to run."""
