"""Exception types raised across the package."""


class CohestError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(CohestError, ValueError):
    pass


class NotHermitian(CohestError, ValueError):
    pass


class InvalidState(CohestError, ValueError):
    pass


class InvalidEdge(CohestError, ValueError):
    pass


class EtaOutOfRange(CohestError, ValueError):
    pass


class DependentGenerators(CohestError, ValueError):
    pass


class UnknownOperator(CohestError, KeyError):
    pass


class UnknownLabel(CohestError, KeyError):
    pass


class ParseError(CohestError, ValueError):
    """Malformed input file. ``line`` is 1-based (header is line 1)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NoFeasibleSolution(CohestError):
    """The constraint polytope is empty."""


class UnboundedProgram(CohestError):
    pass


class NumericalBreakdown(CohestError):
    def __init__(self, message: str, iterations: int):
        self.iterations = iterations
        super().__init__(f"{message} (after {iterations} iterations)")


class ZeroL2(CohestError, ValueError):
    pass


class L2OutOfRange(CohestError, ValueError):
    pass


class InternalMismatch(CohestError):
    pass


class ExactIsZero(CohestError, ZeroDivisionError):
    pass


class ConfigError(CohestError, ValueError):
    pass
