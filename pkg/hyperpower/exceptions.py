# hyperpower/exceptions.py


class InversionError(Exception):
    """Base class for every error raised by the hyperpower library."""


class ShapeError(InversionError, ValueError):
    """Operands have incompatible shapes, or a square matrix was required."""


class NonFiniteError(InversionError, ValueError):
    """A matrix entry or coefficient is NaN or infinite."""


class SingularInputError(InversionError, ValueError):
    """The input cannot be inverted (zero matrix)."""


class DivergenceError(InversionError, ArithmeticError):
    """The residual became non-finite during an iteration."""


class EigenvalueError(InversionError, ArithmeticError):
    """The Jacobi eigensolver rejected its input or ran out of sweeps."""


class MatrixMarketError(InversionError, ValueError):
    """
    Malformed Matrix Market input. ``lineno`` is 1-based and points at the
    offending line of the file (None when the file ended early).
    """

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        self.reason = message
        if lineno is not None:
            message = "line %d: %s" % (lineno, message)
        super().__init__(message)
