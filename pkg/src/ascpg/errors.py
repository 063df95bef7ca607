"""Exception types raised across the package."""


class InvalidArgument(ValueError):
    """A caller passed a value outside an operation's domain."""


class UnsupportedOperation(NotImplementedError):
    """The requested quantity is not available for this problem (e.g. no exact model)."""


class ConstructionError(RuntimeError):
    """A randomized problem builder could not produce a valid instance."""


class DivergenceError(FloatingPointError):
    """An iterate became nonfinite or exceeded the divergence threshold.

    ``k`` is the iteration at which it was detected and ``trace`` holds the
    records collected up to that point (may be ``None`` when raised from a
    single step).
    """

    def __init__(self, k, message=None, trace=None):
        self.k = k
        self.trace = trace
        super().__init__(message or f"iterates diverged at iteration k={k}")
