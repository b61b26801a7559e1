"""Exception and warning types shared across the package."""


class FracZeroError(Exception):
    """Base class for all package-specific errors."""


class BranchCutError(FracZeroError):
    """Evaluation point lies on the negative real axis of a fractional-order
    transfer function (the principal-branch cut)."""


class PoleHitError(FracZeroError):
    """Denominator vanished (within machine tolerance) at the requested point."""

    def __init__(self, where, message=None):
        self.where = where
        super().__init__(message or f"denominator vanishes at s = {where}")


class PoleAtOriginError(FracZeroError):
    """DC gain requested for a transfer function with a pole at s = 0."""


class PlantSpecError(FracZeroError):
    """A plant description (JSON file or dict) failed validation."""


class NoSolutionError(FracZeroError):
    """A design search could not meet its target.

    ``loop`` identifies which loop failed ("bare" or "cancelled") for the
    gain searches; ``best_pm_deg`` carries the best achieved phase margin
    for the order search.
    """

    def __init__(self, message, loop=None, best_pm_deg=None):
        self.loop = loop
        self.best_pm_deg = best_pm_deg
        super().__init__(message)


class InstabilityError(FracZeroError):
    """Closed-loop simulation diverged."""

    def __init__(self, time_s, message=None):
        self.time_s = time_s
        super().__init__(message or f"trajectory diverged at t = {time_s:.6g} s")


class MetricsUndefinedError(FracZeroError):
    """Step metrics requested for a trajectory with no usable steady state."""


class IltAccuracyWarning(UserWarning):
    """Numerical inverse Laplace transform did not meet its internal
    convergence estimate; results may be less accurate than requested."""
