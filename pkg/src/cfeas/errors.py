"""Exception hierarchy shared across the library."""


class CfeasError(Exception):
    """Base class for all library-specific errors."""


class DimensionMismatch(CfeasError, ValueError):
    """Point dimension does not match the set's ambient dimension."""


class NonconvergedProjection(CfeasError, RuntimeError):
    """An iterative projection failed to reach its residual tolerance."""


class EigenFailure(CfeasError, RuntimeError):
    """Symmetric eigendecomposition did not converge."""


class DegenerateCircumcenter(CfeasError, RuntimeError):
    """Distinct collinear points admit no equidistant point in their span.

    This configuration cannot arise from reflections of a centralized point,
    so it signals caller misuse rather than a numerical accident.
    """


class InvalidKernel(CfeasError, ValueError):
    """Kernel token sequence violates the admissibility invariants."""


class InvalidSchedule(CfeasError, ValueError):
    """Step-size schedule is malformed (empty table, value outside (0,1))."""


class InvalidSpec(CfeasError, ValueError):
    """Problem-generator parameters are out of range."""


class InsufficientTrace(CfeasError, ValueError):
    """Trace too short (or too noisy) for convergence-order estimation."""


class NumericalFailure(CfeasError, RuntimeError):
    """Wraps an upstream numerical error with the iteration it occurred at."""

    def __init__(self, iteration, cause):
        super().__init__(f"iteration {iteration}: {cause}")
        self.iteration = iteration
        self.cause = cause


class EmptyInput(CfeasError, ValueError):
    """An operation that needs at least one element received none."""
