"""Exception types raised across the package."""


class QCorrError(Exception):
    """Base class for package errors."""


class NonHermitian(QCorrError):
    pass


class InvalidState(QCorrError):
    """Raised when a matrix fails density-matrix validation.

    ``reason`` is one of ``"NonHermitian"``, ``"TraceNotOne"``,
    ``"NegativeEigenvalue"``, ``"BadShape"`` or ``"Parse"``.
    """

    def __init__(self, reason, message=""):
        self.reason = reason
        super().__init__(f"{reason}: {message}" if message else reason)


class OutOfRange(InvalidState):
    def __init__(self, message=""):
        super().__init__("OutOfRange", message)


class NotXState(QCorrError):
    pass


class ConstraintInfeasible(QCorrError):
    pass


class InternalConsistencyError(QCorrError):
    """A computed quantity violates a hard identity beyond optimizer slack."""
