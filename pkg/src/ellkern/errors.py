"""Exception types shared across the package."""


class EllkernError(Exception):
    """Base class for all package errors."""


class InvalidLattice(EllkernError):
    """Lattice parameters violate Im(tau) > 0 or the |q| convergence margin."""


class NonConvergence(EllkernError):
    """A q-series hit its term cap before meeting the truncation target."""


class NearSingularity(EllkernError):
    """Evaluation point too close to a theta zero / Weierstrass pole."""


class InvalidCoupling(EllkernError):
    """Coupling data violates a precondition (zero mass, lambda = 0, ...)."""


class SamplingExhausted(EllkernError):
    """Rejection sampling could not produce enough admissible points."""


class QuadratureNonConvergence(EllkernError):
    """Contour quadrature failed to stabilize within the refinement limit."""


class InvalidContour(EllkernError):
    """Contour violates its admissibility conditions."""


class BranchStepTooLarge(EllkernError):
    """A branch-continuation step changed a factor argument by >= pi/2."""


class MonodromyFailure(EllkernError):
    """Integrand did not return to its original branch after a closed path."""


class DegenerateEigenfunction(EllkernError):
    """Contour produced the zero function; no eigenfunction statement possible."""
