class TwaLockError(Exception):
    """Base class for every error raised by twalock."""


class ConfigurationError(TwaLockError, ValueError):
    """A lock, array or benchmark was configured with invalid parameters."""


class InvariantViolation(TwaLockError):
    """A harness-level invariant did not hold after a run.

    Carries the offending figures so the CLI can report them.
    """

    def __init__(self, message, **figures):
        super().__init__(message)
        self.figures = figures

    def __str__(self):
        base = super().__str__()
        if not self.figures:
            return base
        details = ", ".join(f"{k}={v}" for k, v in sorted(self.figures.items()))
        return f"{base} ({details})"
