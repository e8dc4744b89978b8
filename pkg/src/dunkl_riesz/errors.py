"""Exception types shared across the package."""

from __future__ import annotations


class DunklError(Exception):
    """Base class for all package errors."""


class InvalidArgument(DunklError, ValueError):
    pass


class GroupTooLarge(DunklError):
    """Group closure exceeded the configured order bound."""


class UnsupportedGroup(DunklError, NotImplementedError):
    """No explicit intertwining measure is available for this group."""


class AccuracyNotReached(DunklError):
    """A quadrature ran out of budget; carries the best estimate."""

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(f"{message} (estimate={estimate!r}, error={error!r})")
        self.estimate = estimate
        self.error = error


class SingularPair(DunklError):
    """Kernel requested on (or too near) the orbit diagonal d(x, y) = 0."""


class InsufficientResolution(DunklError):
    """A region holds too few grid samples to be resolved."""


class GridMismatch(DunklError, ValueError):
    pass


class ConfigError(DunklError, ValueError):
    """Configuration validation failure; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
