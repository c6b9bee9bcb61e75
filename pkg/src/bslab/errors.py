"""Exception hierarchy shared across the package."""


class BslabError(Exception):
    """Base class for all package-specific errors."""


class ResolutionTooLow(BslabError):
    """Grid resolution below the minimum supported size."""


class QuadratureNotConverged(BslabError):
    """Adaptive quadrature exhausted its budget above tolerance."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class RangeError(BslabError):
    """Argument outside the numerically safe range (e.g. exp overflow)."""


class NearResonance(BslabError):
    """Fourier symbol denominator too close to zero."""


class SingularPoint(BslabError):
    """Kernel evaluated at (numerically) coincident points."""


class GridMismatch(BslabError):
    """Operands discretized on incompatible grids."""


class NotConverged(BslabError):
    """Iterative solve failed to reach the requested residual."""

    def __init__(self, iterations, residual, message=None):
        super().__init__(
            message or f"no convergence after {iterations} iterations "
            f"(residual {residual:.3e})"
        )
        self.iterations = iterations
        self.residual = residual


class DegenerateFoci(BslabError):
    """Two-center coordinates requested for coincident foci."""


class AdmissibilityError(BslabError):
    """Potential family not smooth enough for the requested operation."""


class NearSingular(BslabError):
    """Integral has a non-integrable (or out-of-regime) singularity."""


class NoBracket(BslabError):
    """Root bracketing failed in a scalar search."""


class ZeroDifference(BslabError):
    """Difference of potentials is numerically zero."""


class ScenarioError(BslabError):
    """Malformed input/scenario file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
