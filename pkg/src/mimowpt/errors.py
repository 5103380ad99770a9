"""Exception hierarchy shared across the package."""


class MimoWptError(Exception):
    """Base class for all package errors."""


class InvalidInputError(MimoWptError, ValueError):
    """An argument is malformed: wrong shape, non-finite, out of range."""


class ConfigurationError(MimoWptError, ValueError):
    """A parameter set or config file is inconsistent."""


class PassivityError(InvalidInputError):
    """A receive combiner has gain above one."""


class DegenerateChannelError(InvalidInputError):
    """The effective channel vanishes, so no beam direction is defined."""


class UndefinedRatioError(MimoWptError, ArithmeticError):
    """A ratio was requested on a zero-trace matrix."""


class InfeasibleError(MimoWptError):
    """The optimization problem has no strictly feasible point."""


class ConvergenceError(MimoWptError):
    """A solver hit its iteration limit.

    ``best`` holds the last iterate (solver specific) and ``trace`` any
    per-iteration history collected before the failure.
    """

    def __init__(self, message, best=None, trace=None):
        super().__init__(message)
        self.best = best
        self.trace = list(trace) if trace is not None else []
