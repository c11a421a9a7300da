"""Exception types shared across the lab."""


class CarLabError(Exception):
    """Base class for all car-lab errors."""


class InsufficientWindowError(CarLabError):
    """The mode window is too small for the requested computation.

    Carries ``required_n_max``, the smallest window that would suffice.
    """

    def __init__(self, message, required_n_max=None):
        super().__init__(message)
        self.required_n_max = required_n_max


class IndeterminateRankError(CarLabError):
    """Singular values show no clean zero/nonzero gap; rank decision refused."""


class NotStabilizedError(CarLabError):
    """A windowed quantity did not stabilize across window enlargements."""


class MarginExhaustedError(CarLabError):
    """An operator was applied to a state touching the window boundary."""


class InternalConsistencyError(CarLabError):
    """Two independent computational routes disagreed beyond tolerance.

    This signals a truncation or bookkeeping bug, not bad user input.
    """
