"""Exception hierarchy for mesh validation, assembly and spectral failures."""


class TachibanaError(Exception):
    """Base class for all package-specific errors."""


class NonManifold(TachibanaError):
    """A codimension-1 face is shared by a number of top cells other than two."""


class NonOrientable(TachibanaError):
    """Orientation propagation across shared faces reached a contradiction."""


class DegenerateSimplex(TachibanaError):
    """Edge lengths violate the Cayley-Menger positivity condition."""


class NegativeDualVolume(TachibanaError):
    """A circumcentric dual volume is not strictly positive.

    The diagonal Hodge star requires every net dual volume to be positive;
    clamping would corrupt spectra, so the build fails instead.
    """


class ModeConflict(TachibanaError):
    """Requested operation is incompatible with the metric's curvature mode."""


class ModeUnsupported(TachibanaError):
    """No curvature term is available for this (dimension, degree, mode)."""


class ConvergenceFailure(TachibanaError):
    """Iterative eigensolver exceeded its iteration cap."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class WindowTooSmall(TachibanaError):
    """Spectral window does not certify a kernel split; raise m and retry."""


class OracleMismatch(TachibanaError):
    """Spectral Betti number disagrees with the exact integer homology rank."""


class NoEmbedding(TachibanaError):
    """Operation requires vertex coordinates the mesh does not carry."""


class RecipeError(TachibanaError):
    """Mesh recipe parameters are out of range or inconsistent."""
