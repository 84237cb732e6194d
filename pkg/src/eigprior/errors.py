"""Exception types shared across the package.

Validation problems (bad shapes, out-of-range parameters, malformed files)
raise plain ``ValueError`` or a subclass. Numerical failures raise
``NumericalError`` subclasses so callers can distinguish "you gave me
garbage" from "the computation broke down".
"""


class NumericalError(RuntimeError):
    """A numerical procedure failed (lost definiteness, did not converge)."""


class NotPositiveDefiniteError(NumericalError):
    """Cholesky pivot at ``pivot`` fell below the positive-definiteness floor."""

    def __init__(self, pivot: int, message: str | None = None):
        self.pivot = pivot
        super().__init__(message or f"matrix is not positive definite (pivot {pivot})")


class ConvergenceError(NumericalError):
    """An iteration hit its cap; ``residual`` is the last convergence measure."""

    def __init__(self, message: str, residual: float = float("nan")):
        self.residual = residual
        super().__init__(message)


class FormatError(ValueError):
    """A text file did not match the expected matrix/vector/prior layout."""
