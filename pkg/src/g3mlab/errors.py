"""Exception hierarchy.

Every error raised by the library derives from :class:`G3MError`, which is a
``ValueError`` so callers that only care about bad inputs can catch that.
"""


class G3MError(ValueError):
    """Base class for all library errors."""


class InvalidPool(G3MError):
    pass


class DxOutOfRange(G3MError):
    """The requested withdrawal would drain (or overdraw) a reserve."""


class NotOppositeDirections(G3MError):
    pass


class NoArbViolatedOnEntry(G3MError):
    """The external price is already outside the pool's bid/ask band."""


class InvalidPrice(G3MError):
    pass


class InitialOutOfBand(G3MError):
    pass


class InitialArbitrage(G3MError):
    pass


class FeeNotZero(G3MError):
    pass


class EmptyPath(G3MError):
    pass


class InvalidConfig(G3MError):
    pass


class InvalidParams(G3MError):
    pass


class LengthMismatch(G3MError):
    pass


class EmptyFile(G3MError):
    pass


class NonMonotoneTimestamps(G3MError):
    pass


class ParseError(G3MError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
