"""Exception hierarchy shared across the package.

Every failure mode the pipeline can hit maps to one of four families so the
CLI can translate them into stable exit codes: config (2), data (3),
numeric (4).
"""


class LeadLagError(Exception):
    """Base class for all package errors."""


class ConfigError(LeadLagError):
    """Invalid or inconsistent configuration."""


class DataError(LeadLagError):
    """Unusable input data: unreadable files, malformed rows over the
    tolerated fraction, duplicate timestamps, mismatched grids."""


class NumericError(LeadLagError):
    """Base class for numerical failures."""


class InsufficientSampleError(NumericError):
    """Fewer usable observations than the configured minimum."""

    def __init__(self, n: int, required: int, context: str = ""):
        self.n = n
        self.required = required
        msg = f"sample size {n} below required minimum {required}"
        if context:
            msg = f"{context}: {msg}"
        super().__init__(msg)


class DegenerateSampleError(NumericError):
    """A sample whose variance structure makes the statistic undefined
    (zero-variance column, zero residual variance)."""


class SingularityError(NumericError):
    """A closed-form denominator vanished (conditioning correlation at +-1)."""


class RankDeficiencyError(NumericError):
    """Regression design matrix is rank deficient or too ill-conditioned."""


class NonConvergenceError(NumericError):
    """Iterative procedure failed to reach tolerance within its budget."""

    def __init__(self, what: str, iterations: int, residual: float):
        self.what = what
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"{what} did not converge in {iterations} iterations "
            f"(residual {residual:.3e})"
        )


class UnstableSystemError(NumericError):
    """A lag-1 coefficient matrix with spectral radius >= 1."""
