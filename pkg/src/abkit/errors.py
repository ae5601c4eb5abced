"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: ConfigError -> 2,
AccuracyError -> 3, DomainError -> 4.
"""


class AbkitError(Exception):
    pass


class DomainError(AbkitError):
    """Input outside the mathematical domain (singular set, negative order)."""


class ConfigError(AbkitError):
    """Inconsistent grid/run configuration."""


class AccuracyError(AbkitError):
    """A tolerance target could not be met; carries the best estimate."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class StabilityError(AbkitError):
    """Blow-up guard tripped during time stepping."""
