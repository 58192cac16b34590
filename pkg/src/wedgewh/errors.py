"""Exception types shared across the package."""


class WedgeError(Exception):
    """Base class for all package-specific failures."""


class DomainError(WedgeError):
    """Input outside the mathematical domain of an operation."""


class BranchPointError(DomainError):
    """Evaluation point too close to a kernel branch point."""


class SingularMatrixError(WedgeError):
    """Matrix singular to working precision."""


class IterationFailureError(WedgeError):
    """An iterative routine (QR sweeps, power iteration) did not converge."""


class ApproximationFailureError(WedgeError):
    """Rational approximation retries exhausted.

    Carries the defect metrics of the last attempt in ``details``.
    """

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details or {}


class QuadratureFailureError(WedgeError):
    """Composite quadrature failed to converge within its refinement budget."""


class DivergenceError(WedgeError):
    """The coupled iteration is diverging; carries the error history."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = history or []


class ResonanceError(WedgeError):
    """Configuration hits one of the array resonance conditions."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ConfigError(WedgeError):
    """Invalid physical or numerical configuration."""
