"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """An argument violates a documented precondition."""


class ConfigurationError(ValueError):
    """A solver configuration is inconsistent or outside its stability range."""


class NumericFailureError(RuntimeError):
    """A solver produced non-finite values; carries the failing iteration."""

    def __init__(self, message: str, iteration: int):
        super().__init__(message)
        self.iteration = iteration
