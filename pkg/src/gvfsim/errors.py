"""Exception types shared across the package."""


class GvfSimError(Exception):
    """Base class for errors raised by this package."""


class SingularJacobianError(GvfSimError):
    """Frame Jacobian is not invertible at the evaluated state."""


class EulerSingularityError(GvfSimError):
    """Target pitch entered the guard band around the Euler-angle singularity."""


class GainValidityError(GvfSimError, ValueError):
    """Gain set violates a validity condition for the requested mode."""


class DivergenceError(GvfSimError):
    """Simulated state left the sanity bounds; integration aborted."""

    def __init__(self, message: str, time: float | None = None):
        super().__init__(message)
        self.time = time


class ConfigError(GvfSimError, ValueError):
    """Scenario document failed schema validation."""
