"""Exception types raised across the package."""


class DelayOscError(Exception):
    """Base class for every error raised by delayosc."""


class SingularOperator(DelayOscError):
    pass


class NonFiniteInput(DelayOscError, ValueError):
    pass


class NonFiniteValue(DelayOscError, ValueError):
    pass


class InvalidInterval(DelayOscError, ValueError):
    pass


class ExcessiveHorizon(DelayOscError, ValueError):
    pass


class DomainError(DelayOscError, ValueError):
    pass


class SmoothnessError(DelayOscError):
    pass


class OutOfHorizon(DelayOscError, ValueError):
    pass


class GridMismatch(DelayOscError, ValueError):
    pass


class SlopeUndefined(DelayOscError):
    pass


class ConfigError(DelayOscError, ValueError):
    """Raised for malformed scenario configs; the message names the field."""
