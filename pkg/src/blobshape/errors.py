"""Exception types shared across the package."""


class BlobError(Exception):
    """Base class for all package-specific errors."""


class DomainError(BlobError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CurveValidationError(BlobError, ValueError):
    """A curve violates one of its structural invariants.

    The offending invariant is named so callers (and the CLI) can report it.
    """

    def __init__(self, invariant, message):
        self.invariant = invariant
        super().__init__(f"{invariant}: {message}")


class QuadratureError(BlobError, ArithmeticError):
    """Quadrature refinement failed to reach the requested tolerance.

    Carries the best available value and the relative error achieved so far.
    """

    def __init__(self, best_estimate, achieved_relative_error, requested):
        self.best_estimate = best_estimate
        self.achieved_relative_error = achieved_relative_error
        self.requested = requested
        super().__init__(
            "quadrature stalled at relative error "
            f"{achieved_relative_error:.3e} (requested {requested:.3e}); "
            f"best estimate {best_estimate!r}"
        )


class ConvergenceError(BlobError, ArithmeticError):
    """An iterative solver exhausted its iteration budget.

    ``trace`` holds the iterate history that led to the failure.
    """

    def __init__(self, message, trace=None):
        self.trace = trace if trace is not None else []
        super().__init__(message)


class CsvFormatError(BlobError, ValueError):
    """A curve CSV file is malformed. ``line_number`` is 1-based."""

    def __init__(self, line_number, message):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")
