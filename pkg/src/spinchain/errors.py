"""Exception types shared across the package."""


class CapacityError(RuntimeError):
    """A requested computation exceeds a configured size limit."""


class ConfigError(ValueError):
    """An experiment configuration is malformed or inconsistent."""


class NumericsError(RuntimeError):
    """A numerical routine failed to converge or produced unusable output."""
