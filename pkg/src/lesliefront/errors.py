"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where a formula or map is defined."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class PreconditionError(ValueError):
    """An operation was called in a state its assumptions exclude."""


class ProfileError(PreconditionError):
    """Initial data violate the compatibility conditions at x=0 and x=h0."""


class IntegrationFault(RuntimeError):
    """A time step produced a state that breaks a known invariant.

    Attributes:
        quantity: name of the offending quantity (``"u"``, ``"hprime"``, ...).
        value: the offending value.
        time: simulation time of the failing step, if known.
    """

    def __init__(self, message, quantity=None, value=None, time=None):
        super().__init__(message)
        self.quantity = quantity
        self.value = value
        self.time = time


class DivergenceFault(IntegrationFault):
    """Non-finite values appeared; usually the time step is too large."""


class TruncationError(RuntimeError):
    """A truncated-domain computation could not be resolved; enlarge the domain."""


class NoMonotoneFrontError(ValueError):
    """No monotone travelling front exists at the requested speed."""


class ConfigError(ValueError):
    """Malformed or invalid run configuration."""

    def __init__(self, message, key=None, line=None):
        loc = []
        if key is not None:
            loc.append(f"key '{key}'")
        if line is not None:
            loc.append(f"line {line}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.key = key
        self.line = line


class InconsistencyError(RuntimeError):
    """Derived constants contradict their defining inequalities."""
