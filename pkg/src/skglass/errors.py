"""Exception types shared across the package.

The CLI maps these onto distinct exit codes: check failure 1, configuration
error 2, capacity error 3, integrity error 4.
"""


class SKGlassError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(SKGlassError):
    """Invalid configuration, arguments, or parameter combinations."""


class CapacityError(SKGlassError):
    """Instance size exceeds an enumeration or memory cap."""


class IntegrityError(SKGlassError):
    """Persisted or computed data failed an internal consistency check."""


class CheckError(SKGlassError):
    """A verification check did not hold."""
