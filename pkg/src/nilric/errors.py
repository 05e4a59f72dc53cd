"""Exception hierarchy shared by all modules."""


class NilricError(Exception):
    """Base class for errors raised by this package."""


class DimensionMismatch(NilricError, ValueError):
    pass


class SingularFrame(NilricError, ValueError):
    pass


class JacobiViolation(NilricError, ValueError):
    pass


class NotNilpotent(NilricError, ValueError):
    pass


class NonSymmetricInput(NilricError, ValueError):
    pass


class HypothesisViolated(NilricError, RuntimeError):
    """A decomposition fails the closed-orbit hypotheses (usually a rank-tolerance problem)."""


class MaxIterationsExceeded(NilricError, RuntimeError):
    """The orbit flow did not reach its residual tolerance.

    The best report seen (lowest residual over all restarts) is attached as ``report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class DivergenceDetected(NilricError, RuntimeError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class TargetNotInTheoremSet(NilricError, ValueError):
    pass


class NewtonFailed(NilricError, RuntimeError):
    pass


class SignatureMismatch(NilricError, RuntimeError):
    pass


class MiddleBlockSingular(NilricError, ValueError):
    pass


class ParseError(NilricError, ValueError):
    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f"line {line}"
            if column is not None:
                loc += f", column {column}"
            loc += ": "
        super().__init__(loc + message)
        self.line = line
        self.column = column


class UnknownAlgebra(NilricError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown algebra"
