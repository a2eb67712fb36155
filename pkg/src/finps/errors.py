"""Exception types raised by the engine."""


class FinPSError(ValueError):
    """Base class for all validation errors."""


class SpaceMismatch(FinPSError):
    pass


class NotStochastic(FinPSError):
    pass


class NotMeasurePreserving(FinPSError):
    def __init__(self, message, generator=None, state=None):
        super().__init__(message)
        self.generator = generator
        self.state = state


class PreconditionError(FinPSError):
    """A documented precondition failed; ``witness`` carries the offending data."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness or {}


class NotExchangeable(PreconditionError):
    pass


class InvalidPartition(FinPSError):
    pass


class ConsistencyError(RuntimeError):
    """An internal theorem check failed. Always an engine bug."""


class SpecError(FinPSError):
    """A chain-spec validation error located by field path (and line, when known)."""

    def __init__(self, message, path="", line=None):
        where = path or "<root>"
        if line is not None:
            where = f"line {line}: {where}"
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line = line
        self.detail = message
