"""Exceptions shared across the package."""


class GridMismatchError(ValueError):
    """Two bodies sampled on different angular grids were combined."""


class BlowupError(RuntimeError):
    """An integration left the admissible range before the requested horizon.

    Carries the last time that was reached and, when available, the partial
    trajectory computed up to that time.
    """

    def __init__(self, message, reached_time, partial=None):
        super().__init__(message)
        self.reached_time = float(reached_time)
        self.partial = partial


class ContractionError(RuntimeError):
    """Fixed-point iteration failed to contract on the requested horizon."""
