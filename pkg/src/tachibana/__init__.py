"""Discrete exterior calculus engine for spectral invariants of closed
oriented manifolds: Betti, Tachibana, Killing and planar numbers."""

from .errors import (
    ConvergenceFailure,
    DegenerateSimplex,
    ModeConflict,
    ModeUnsupported,
    NegativeDualVolume,
    NoEmbedding,
    NonManifold,
    NonOrientable,
    OracleMismatch,
    RecipeError,
    TachibanaError,
    WindowTooSmall,
)
from .simplicial import (
    SimplicialComplex,
    build_complex,
    euler_characteristic,
    homology_ranks,
)

__version__ = "0.1.0"
