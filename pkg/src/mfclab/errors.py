"""Exception types shared across the lab."""


class MfclabError(Exception):
    """Base class for all package errors."""


class SingularityError(MfclabError):
    """Raised when an operation hits a forbidden singular point (e.g. Vx below
    the slip-angle guard, or a singular decoupling matrix)."""


class WindowNotFullError(MfclabError):
    """Raised when a sliding-window estimator is queried before the window fills."""


class InsufficientSamplesError(MfclabError):
    """Raised when a derivative window holds fewer samples than required."""


class OffCorridorError(MfclabError):
    """Raised when the vehicle leaves the configured corridor around the path."""


class NonFiniteStateError(MfclabError):
    """Raised when the integrated plant state contains NaN or Inf."""


class ConfigError(MfclabError):
    """Raised on invalid configuration values; message names the offending key."""
