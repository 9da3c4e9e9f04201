"""Exceptions raised by coherencelab.

Every error derives from CoherenceLabError and from the closest builtin, so
callers can catch either.
"""


class CoherenceLabError(Exception):
    pass


class InvalidParameterError(CoherenceLabError, ValueError):
    pass


class CoherenceBoundError(CoherenceLabError, ValueError):
    pass


class UndefinedCoherenceError(CoherenceLabError, ValueError):
    pass


class CoincidenceError(CoherenceLabError, ValueError):
    pass


class NotApplicableError(CoherenceLabError, ValueError):
    pass


class UnsupportedQueryError(CoherenceLabError, ValueError):
    pass


class InvalidCorrelationError(CoherenceLabError, ValueError):
    pass


class DegenerateKernelError(CoherenceLabError, ValueError):
    pass


class BoundaryPeakError(CoherenceLabError, ValueError):
    pass


class DegenerateSpectrumError(CoherenceLabError, ArithmeticError):
    pass


class DegenerateLinewidthError(CoherenceLabError, ValueError):
    pass


class NumericalError(CoherenceLabError, ArithmeticError):
    pass


class ConvergenceError(NumericalError):
    pass


class NumericalDegeneracyError(NumericalError):
    pass


class GridTooNarrowError(NumericalError):
    pass


class ConfigValidationError(CoherenceLabError, ValueError):
    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class OutputError(CoherenceLabError, OSError):
    def __init__(self, path: str, reason: str):
        self.path = path
        super().__init__(f"cannot write {path}: {reason}")
