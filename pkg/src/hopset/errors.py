"""Exception hierarchy shared by every hopset module."""


class HopsetError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class MalformedInput(HopsetError):
    exit_code = 2

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InfeasibleDemand(HopsetError):
    exit_code = 2

    def __init__(self, s, t, reason=""):
        self.s, self.t = s, t
        super().__init__(f"demand ({s}, {t}) is infeasible" + (f": {reason}" if reason else ""))


class ForeignEdge(HopsetError):
    """An edge outside the candidate set was offered as a hopset edge."""

    exit_code = 2


class CapExceeded(HopsetError):
    exit_code = 3


class IterationLimit(HopsetError):
    exit_code = 3


class NumericalFailure(HopsetError):
    exit_code = 3


class NoFeasiblePath(HopsetError):
    pass


class WrongHopbound(HopsetError):
    exit_code = 2


class BadHopbound(WrongHopbound):
    pass


class MalformedTree(HopsetError):
    pass


class NoTree(HopsetError):
    pass


class InvalidCover(HopsetError):
    pass


class NotCanonical(HopsetError):
    pass


class Infeasible(HopsetError):
    pass
