"""Exception types shared across the package.

Numeric failures carry enough payload to diagnose which solve or
quadrature gave up; the CLI maps them to exit code 1.
"""


class CwtoriError(Exception):
    """Base class for all package errors."""


class DegenerateLatticeError(CwtoriError):
    """Discriminant of (g2, g3) is zero to working precision.

    Callers must switch to the trigonometric limit formulas.
    """

    def __init__(self, g2, g3, disc):
        super().__init__(
            f"degenerate lattice: D={disc:.3e} for g2={g2!r}, g3={g3!r}"
        )
        self.g2 = g2
        self.g3 = g3
        self.disc = disc


class InvalidInvariantsError(CwtoriError):
    """Computed periods fail a consistency identity (Legendre relation)."""


class PoleProximityError(CwtoriError):
    """Evaluation point too close to a lattice point for p/zeta."""

    def __init__(self, z, distance):
        super().__init__(f"z={z!r} within {distance:.3e} of a lattice point")
        self.z = z
        self.distance = distance


class NegativeRadicandError(CwtoriError):
    """Closed-form curvature radicand went negative (wrong x0 branch)."""


class NoConvergenceError(CwtoriError):
    """Root solve or continuation step failed to converge."""


class DerivativeDegenerateError(CwtoriError):
    """Monodromy derivative in rho vanishes (n = 1 Moebius case)."""


class NoReturnError(CwtoriError):
    """Curvature orbit failed to return to its initial point within span."""


class ConstraintViolationError(CwtoriError):
    """Curve construction constraint not satisfied at input tolerance."""


class SigmaZeroProximityError(CwtoriError):
    """Sampling point too close to a zero of sigma (curve formula pole)."""


class OpenCurveError(CwtoriError):
    """Operation requires a closed profile curve."""


class DriftError(CwtoriError):
    """Horizontal-lift integration drift exceeded tolerance."""


class RadicandError(CwtoriError):
    """Angle-quadrature radicand negative: inconsistent (Omega, R') data."""


class ProfileRangeError(CwtoriError):
    """Fiber-curvature data leaves the admissible band (R^2 must be in (0,1))."""


class NoRootError(CwtoriError):
    """Bracketed root expected but not found on the search interval."""


class InsufficientSamplesError(CwtoriError):
    """Too few family samples for a finite-difference estimate."""


class ModeCapWarning(UserWarning):
    """Stability scan minimizer sits on the mode-cap boundary."""


class ResolutionWarning(UserWarning):
    """Quadrature disagrees with its refinement beyond tolerance."""
