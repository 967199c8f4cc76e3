"""Exception types shared across the package."""


class LeviRamseyError(Exception):
    """Base class for all package errors."""


class DomainError(LeviRamseyError, ValueError):
    """An operation was called with an input outside its physical domain."""


class ConfigError(LeviRamseyError, ValueError):
    """An experiment configuration violates an invariant or names an unknown key."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


class SequenceError(LeviRamseyError, ValueError):
    """A pulse sequence violates the protocol invariants."""


class TruncationError(LeviRamseyError, RuntimeError):
    """A truncated number-basis representation lost more weight than tolerated."""


class TruncationWarning(UserWarning):
    """Evolved state developed tail weight above tolerance; results may be degraded."""
