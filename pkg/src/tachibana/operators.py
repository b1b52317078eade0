"""Discrete differential operators and the quadratic forms whose kernels
define the invariant numbers.

All stiffness matrices are assembled as C^T C sums (with diagonal scalings
folded into C), which makes them bitwise symmetric without post-hoc
symmetrization and positive semidefinite where the continuum operator is.

The conformal-Killing form avoids discretizing the first-order operator
directly: substituting the Weitzenboeck identity rough = hodge - curvature
into the operator's Laplacian expresses its quadratic form through d, the
codifferential and the curvature term alone,

    q_T(w) = [ (r/(r+1)) |dw|^2 + ((n-r)/(n-r+1)) |delta w|^2
               - <F_r w, w> ] / (r (r+1)),

which is assembled verbatim.  The co-closed (Killing) and closed (planar)
variants add the complementary positive semidefinite term, so their kernels
are the intersections with ker delta and ker d at the quadratic-form level.
The discrete form may have slightly negative eigenvalues (the curvature
subtraction is O(h^2) inexact), hence kernel counting downstream is
two-sided in |lambda|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .errors import ModeUnsupported
from .geometry import MetricComplex

__all__ = [
    "Cochain",
    "QuadraticForm",
    "coboundary",
    "codifferential",
    "hodge_form",
    "curvature_term",
    "ck_form",
    "killing_form",
    "planar_form",
    "dump_matrix",
]


@dataclass(frozen=True, eq=False)
class Cochain:
    """Real values indexed by the oriented r-simplices."""

    degree: int
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))


@dataclass(frozen=True, eq=False)
class QuadraticForm:
    """Sparse symmetric stiffness paired with its diagonal mass matrix."""

    degree: int
    kind: str
    stiffness: sp.csr_matrix
    mass: np.ndarray

    @property
    def dim(self) -> int:
        return self.stiffness.shape[0]

    def rayleigh(self, values: np.ndarray) -> float:
        v = np.asarray(values, dtype=float)
        return float(v @ (self.stiffness @ v)) / float(v @ (self.mass * v))

    def energy(self, values: np.ndarray) -> float:
        v = np.asarray(values, dtype=float)
        return float(v @ (self.stiffness @ v))


def _check_symmetric(q: sp.spmatrix) -> sp.csr_matrix:
    q = q.tocsr()
    q.sum_duplicates()
    q.sort_indices()
    if (q != q.T).nnz != 0:
        raise AssertionError("stiffness assembly lost exact symmetry")
    return q


def coboundary(metric: MetricComplex, r: int) -> sp.csr_matrix:
    """Discrete exterior derivative d_r = (boundary_{r+1})^T on r-cochains."""
    n = metric.dimension
    if not 0 <= r < n:
        raise ValueError(f"coboundary degree must be in 0..{n - 1}, got {r}")
    return metric.complex.boundary[r].T.tocsr()


def codifferential(metric: MetricComplex, r: int) -> sp.csr_matrix:
    """Mass-adjoint of d: delta_r = M_{r-1}^-1 d_{r-1}^T M_r.

    Agrees with the Hodge-star definition on closed oriented manifolds; the
    sign factor of the star formulation is absorbed by adjointness.
    """
    n = metric.dimension
    if not 1 <= r <= n:
        raise ValueError(f"codifferential degree must be in 1..{n}, got {r}")
    inv = sp.diags(1.0 / metric.mass[r - 1])
    return (inv @ metric.complex.boundary[r - 1].astype(float) @ sp.diags(metric.mass[r])).tocsr()


@lru_cache(maxsize=128)
def _dd_form(metric: MetricComplex, r: int) -> sp.csr_matrix:
    """Stiffness of w -> |dw|^2: (S d)^T (S d) with S = sqrt(M_{r+1})."""
    d = coboundary(metric, r).astype(float)
    c = sp.diags(np.sqrt(metric.mass[r + 1])) @ d
    c = c.tocsr()
    c.sort_indices()
    return _check_symmetric(c.T.tocsr() @ c)


@lru_cache(maxsize=128)
def _codiff_form(metric: MetricComplex, r: int) -> sp.csr_matrix:
    """Stiffness of w -> |delta w|^2 via C = M_{r-1}^-1/2 d_{r-1}^T M_r."""
    c = (
        sp.diags(1.0 / np.sqrt(metric.mass[r - 1]))
        @ metric.complex.boundary[r - 1].astype(float)
        @ sp.diags(metric.mass[r])
    ).tocsr()
    c.sort_indices()
    return _check_symmetric(c.T.tocsr() @ c)


def hodge_form(metric: MetricComplex, r: int) -> QuadraticForm:
    """Hodge Laplacian d*d + dd* as a quadratic form on r-cochains.

    Its numerical kernel dimension equals the r-th Betti number; the
    boundary terms drop at r = 0 and r = n.
    """
    n = metric.dimension
    if not 0 <= r <= n:
        raise ValueError(f"degree must be in 0..{n}, got {r}")
    q = sp.csr_matrix((metric.complex.num(r),) * 2)
    if r < n:
        q = q + _dd_form(metric, r)
    if r > 0:
        q = q + _codiff_form(metric, r)
    return QuadraticForm(r, "hodge", _check_symmetric(q), metric.mass[r])


def curvature_term(metric: MetricComplex, r: int) -> QuadraticForm:
    """Weitzenboeck curvature term F_r as a quadratic form.

    Constant mode: r (n - r) C M_r exactly.  Vertex-defect mode (surfaces,
    r = 1 only): M_1 scaled by the edge-averaged defect curvature.
    """
    n = metric.dimension
    if metric.curvature_mode == "constant":
        factor = r * (n - r) * metric.curvature_constant
        q = sp.diags(factor * metric.mass[r]).tocsr()
    elif metric.curvature_mode == "vertex_defect":
        if not (n == 2 and r == 1):
            raise ModeUnsupported(
                f"vertex_defect curvature term needs n = 2, r = 1; got n={n}, r={r}"
            )
        q = sp.diags(metric.mass[1] * metric.edge_curvature()).tocsr()
    else:  # pragma: no cover - modes validated at build
        raise ModeUnsupported(metric.curvature_mode)
    return QuadraticForm(r, "curvature", q, metric.mass[r])


def _assert_energy_identity(metric: MetricComplex, r: int, q_t, q_dd, q_dl, q_f):
    n = metric.dimension
    rng = np.random.default_rng(7)
    c_d = r / (r + 1.0)
    c_dl = (n - r) / (n - r + 1.0)
    scale = 1.0 / (r * (r + 1.0))
    for _ in range(2):
        w = rng.standard_normal(metric.complex.num(r))
        lhs = w @ (q_t @ w)
        t_d = c_d * (w @ (q_dd @ w))
        t_dl = c_dl * (w @ (q_dl @ w))
        t_f = w @ (q_f @ w)
        rhs = scale * (t_d + t_dl - t_f)
        denom = scale * (abs(t_d) + abs(t_dl) + abs(t_f)) + 1e-300
        if abs(lhs - rhs) > 1e-12 * denom:
            raise AssertionError(
                f"energy identity violated at degree {r}: {lhs!r} vs {rhs!r}"
            )


def ck_form(metric: MetricComplex, r: int) -> QuadraticForm:
    """Quadratic form whose kernel is the discrete conformal Killing space.

    Defined for r = 1..n-1; requires a curvature term compatible with the
    metric's mode.  The assembled energy identity is asserted on random
    probes at build time.
    """
    n = metric.dimension
    if not 1 <= r <= n - 1:
        raise ValueError(f"conformal Killing form needs 1 <= r <= {n - 1}, got {r}")
    q_dd = _dd_form(metric, r)
    q_dl = _codiff_form(metric, r)
    q_f = curvature_term(metric, r).stiffness
    scale = 1.0 / (r * (r + 1.0))
    q = scale * (
        (r / (r + 1.0)) * q_dd + ((n - r) / (n - r + 1.0)) * q_dl - q_f
    )
    q = _check_symmetric(q)
    _assert_energy_identity(metric, r, q, q_dd, q_dl, q_f)
    return QuadraticForm(r, "ck", q, metric.mass[r])


def killing_form(metric: MetricComplex, r: int) -> QuadraticForm:
    """Co-closed conformal Killing (Killing) form: ck plus the dd* term."""
    base = ck_form(metric, r)
    q = _check_symmetric(base.stiffness + _codiff_form(metric, r))
    return QuadraticForm(r, "killing", q, metric.mass[r])


def planar_form(metric: MetricComplex, r: int) -> QuadraticForm:
    """Closed conformal Killing (planar) form: ck plus the d*d term."""
    base = ck_form(metric, r)
    q = _check_symmetric(base.stiffness + _dd_form(metric, r))
    return QuadraticForm(r, "planar", q, metric.mass[r])


FORM_BUILDERS = {
    "hodge": hodge_form,
    "ck": ck_form,
    "killing": killing_form,
    "planar": planar_form,
}


def dump_matrix(matrix, stream) -> None:
    """Write a sparse matrix as coordinate text: row col value per line,
    17 significant digits, for external verification."""
    if isinstance(matrix, QuadraticForm):
        matrix = matrix.stiffness
    coo = sp.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    for i, j, v in zip(coo.row[order], coo.col[order], coo.data[order]):
        stream.write(f"{i} {j} {v:.17g}\n")
