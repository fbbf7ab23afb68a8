"""Exception hierarchy.

Every error carries a short machine-readable ``code`` (the class name) so the
command-line front end can report it without string matching.  Errors caused
by malformed or invalid input derive from :class:`InputError`; failures of a
numeric or exact procedure on valid input derive from :class:`ComputationError`.
"""


class SymboundError(Exception):
    """Base class for all errors raised by this package."""

    @property
    def code(self):
        return type(self).__name__


class InputError(SymboundError, ValueError):
    pass


class ComputationError(SymboundError, ArithmeticError):
    pass


class NotSymmetric(InputError):
    pass


class NotPositiveDefinite(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class CoincidentPoints(InputError):
    pass


class BadCodims(InputError):
    pass


class TooLarge(InputError):
    pass


class NotSorted(InputError):
    pass


class ParseError(InputError):
    """Grammar violation; ``position`` is the 0-based offset into the text."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)
        self.position = position


class NotStabilized(ComputationError):
    pass


class NotInPencil(ComputationError):
    pass


class WindowExhausted(ComputationError):
    pass


class DivisionByZeroSeries(ComputationError, ZeroDivisionError):
    pass


class NotPositive(ComputationError):
    pass


class IncompatibleFrame(ComputationError):
    pass
