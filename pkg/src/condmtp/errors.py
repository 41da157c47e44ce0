"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the documented domain of an operation."""


class AccuracyError(ArithmeticError):
    """A numerical routine could not meet the requested tolerance.

    Carries the best available estimate and a bound on its error so callers
    can decide whether to proceed anyway.
    """

    def __init__(self, message: str, estimate: float, error_bound: float):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class DataError(ValueError):
    """An input file or configuration could not be parsed."""
