"""Exception types raised by linkrate."""


class ParameterError(ValueError):
    """Parameter outside its admissible domain."""


class NumericalInstabilityError(ArithmeticError):
    """Cancellation in the coefficient recursion beyond the guard threshold."""


class CapacityError(RuntimeError):
    """Exact computation would exceed the configured work budget."""

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class InsufficientDataError(ValueError):
    """Trace too short for the requested estimate."""


class ConsistencyError(RuntimeError):
    """Two routes to the same quantity disagree beyond tolerance."""
