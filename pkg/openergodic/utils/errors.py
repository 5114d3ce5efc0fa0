"""
Exception types raised across openergodic.

All of them subclass the builtin they specialise, so callers that only care
about ``ValueError`` keep working.
"""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PreconditionError(ValueError):
    """Inputs are individually valid but violate an operation's precondition."""


class RangeError(OverflowError):
    """Exact integer arithmetic left the signed 64-bit range."""


class ConfigError(ValueError):
    """Invalid run configuration value."""


class GoldenMissingError(FileNotFoundError):
    """A frozen golden value was requested in check mode but is absent."""
