"""
Domain exceptions.
Every exception names the invariant or condition that failed so the CLI can
print a useful diagnostic.
"""

from typing import Optional


class InvariantViolation(ValueError):
    """A domain invariant does not hold for the given input."""

    def __init__(self, invariant: str, detail: str = ""):
        self.invariant = invariant
        message = f"invariant '{invariant}' violated"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


class PostconditionFailed(InvariantViolation):
    """A computed result breaks a bound it is guaranteed to satisfy."""


class InseparableEigenvalues(InvariantViolation):
    """Eigenvalue clusters are too close to be grouped with the requested tolerance."""

    def __init__(self, gap: float, tolerance: float, factor: float):
        self.gap = gap
        self.tolerance = tolerance
        super().__init__(
            "eigenvalue-class-separation",
            f"gap {gap:.3e} lies in ({tolerance:.3e}, {factor * tolerance:.3e}]; "
            "choose a different class tolerance"
        )


class AmplificationUnavailable(ValueError):
    """Maximum pairwise column distance of the limit matrix is numerically one."""

    def __init__(self, alpha: float):
        self.alpha = alpha
        super().__init__(
            f"amplification fails numerically (alpha = {alpha:.12f}); "
            "fall back to the single loop with a large T"
        )


class InconclusiveResult(RuntimeError):
    """A mixing time could not be certified within the configured budget."""


class EigenSolverError(RuntimeError):
    """The symmetric eigensolver failed or produced an inaccurate decomposition."""

    def __init__(self, message: str, residual: Optional[float] = None):
        self.residual = residual
        if residual is not None:
            message = f"{message} (residual {residual:.3e})"
        super().__init__(message)
