"""Intrinsic metric data on a simplicial complex.

Everything is derived from edge lengths alone: simplex volumes through
Cayley-Menger determinants, circumcenters through the barycentric
equidistance system, and circumcentric dual volumes through the orthoscheme
recursion.  For a flag of simplices s_r < s_{r+1} < ... < s_n the segments
between consecutive circumcenters are mutually orthogonal, so each flag
contributes sign * prod(h_j) / (n-r)! to the dual volume of s_r, where
h_j = sqrt(R_j^2 - R_{j-1}^2) and the sign tracks on which side of the face
the coface's circumcenter falls.  Contributions are accumulated with sign
and the build fails fast on any net non-positive dual volume.

Mass matrices M_r = |dual s| / |s| are diagonal and positive, which keeps
every quadratic form downstream sparse and the generalized eigenproblems
trivially reducible to standard symmetric form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import DegenerateSimplex, ModeConflict, ModeUnsupported, NegativeDualVolume
from .simplicial import SimplicialComplex, euler_characteristic

__all__ = ["MetricComplex", "build_metric", "conformal_rescale"]

_DUAL_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class MetricComplex:
    """A simplicial complex plus intrinsic geometry.

    ``mass[r]`` holds the diagonal of M_r; ``<a, b>_r = a @ (mass[r] * b)``
    is the inner product on r-cochains.  Immutable after build; all queries
    are pure.
    """

    complex: SimplicialComplex
    edge_lengths: np.ndarray
    volumes: tuple
    dual_volumes: tuple
    mass: tuple
    circum_radius2: tuple
    circum_bary: tuple
    vertex_defect: np.ndarray | None
    vertex_curvature: np.ndarray | None
    curvature_mode: str
    curvature_constant: float | None

    @property
    def dimension(self) -> int:
        return self.complex.dimension

    def mass_matrix(self, r: int) -> sp.dia_matrix:
        return sp.diags(self.mass[r])

    def inner(self, r: int, a: np.ndarray, b: np.ndarray) -> float:
        return float(a @ (self.mass[r] * b))

    def norm(self, r: int, a: np.ndarray) -> float:
        return math.sqrt(max(self.inner(r, a, a), 0.0))

    def edge_curvature(self) -> np.ndarray:
        """Vertex curvature averaged onto edges, k_e = (K_u + K_v)/2."""
        if self.vertex_curvature is None:
            raise ModeUnsupported("vertex curvature is only defined for surfaces")
        edges = np.asarray(self.complex.simplices[1])
        return 0.5 * (
            self.vertex_curvature[edges[:, 0]] + self.vertex_curvature[edges[:, 1]]
        )

    def total_volume(self) -> float:
        return float(self.volumes[self.dimension].sum())

    def __repr__(self) -> str:
        return (
            f"MetricComplex(n={self.dimension}, counts={self.complex.counts()}, "
            f"mode={self.curvature_mode})"
        )


def _squared_distance_tables(complex_: SimplicialComplex, lengths: np.ndarray):
    """Per degree r >= 1, array (N_r, r+1, r+1) of squared vertex distances."""
    n = complex_.dimension
    sq = {}
    for e, (u, v) in enumerate(complex_.simplices[1]):
        sq[(u, v)] = lengths[e] ** 2
    tables = [None]
    for r in range(1, n + 1):
        simps = complex_.simplices[r]
        table = np.zeros((len(simps), r + 1, r + 1))
        for a in range(r + 1):
            for b in range(a + 1, r + 1):
                col = np.fromiter(
                    (sq[(s[a], s[b])] for s in simps), dtype=float, count=len(simps)
                )
                table[:, a, b] = col
                table[:, b, a] = col
        tables.append(table)
    return tables


def _cayley_menger_volumes(table: np.ndarray, r: int) -> np.ndarray:
    """Unsigned r-volumes from squared-distance matrices (batched)."""
    n_s = table.shape[0]
    if r == 1:
        return np.sqrt(table[:, 0, 1])
    cm = np.ones((n_s, r + 2, r + 2))
    cm[:, 0, 0] = 0.0
    cm[:, 1:, 1:] = table
    det = np.linalg.det(cm)
    factor = (-1) ** (r + 1) / (2**r * math.factorial(r) ** 2)
    vol2 = factor * det
    return vol2  # squared volume; caller validates sign before sqrt


def _circumcenters(table: np.ndarray, r: int):
    """Barycentric circumcenters and squared circumradii (batched).

    Solves [[D, -1], [1, 0]] [b, mu] = [0, 1]; mu equals 2 R^2.
    """
    n_s = table.shape[0]
    a = np.zeros((n_s, r + 2, r + 2))
    a[:, : r + 1, : r + 1] = table
    a[:, : r + 1, r + 1] = -1.0
    a[:, r + 1, : r + 1] = 1.0
    rhs = np.zeros((n_s, r + 2, 1))
    rhs[:, r + 1, 0] = 1.0
    try:
        sol = np.linalg.solve(a, rhs)[:, :, 0]
    except np.linalg.LinAlgError as exc:
        raise DegenerateSimplex(f"singular circumcenter system at degree {r}") from exc
    return sol[:, : r + 1], 0.5 * sol[:, r + 1]


def _coface_incidence(complex_: SimplicialComplex, r: int):
    """Arrays (face_id, coface_id, omitted_position) for degree r+1 cofaces."""
    simps = complex_.simplices[r + 1]
    faces, cofs, pos = [], [], []
    idx = complex_._index[r]
    for ci, s in enumerate(simps):
        for omit in range(r + 2):
            faces.append(idx[s[:omit] + s[omit + 1:]])
            cofs.append(ci)
            pos.append(omit)
    return np.asarray(faces), np.asarray(cofs), np.asarray(pos)


def _triangle_angles(table: np.ndarray) -> np.ndarray:
    """Corner angles (N, 3) of triangles given squared side lengths."""
    d2 = table
    angles = np.empty((table.shape[0], 3))
    for corner, (i, j) in enumerate(((1, 2), (0, 2), (0, 1))):
        num = d2[:, corner, i] + d2[:, corner, j] - d2[:, i, j]
        den = 2.0 * np.sqrt(d2[:, corner, i] * d2[:, corner, j])
        angles[:, corner] = np.arccos(np.clip(num / den, -1.0, 1.0))
    return angles


def build_metric(
    complex_: SimplicialComplex,
    lengths,
    mode: str = "constant",
    constant: float | None = None,
) -> MetricComplex:
    """Assemble volumes, circumcentric duals and mass matrices from lengths.

    Parameters
    ----------
    lengths : positive edge lengths, either an array indexed by edge id or a
        mapping from vertex pairs to lengths.
    mode : "constant" (curvature term uses ``constant``) or "vertex_defect"
        (surfaces only; curvature from angle defects per unit dual area).

    Raises DegenerateSimplex for Cayley-Menger violations and
    NegativeDualVolume when the mesh is not well-centered enough for the
    diagonal Hodge star.
    """
    n = complex_.dimension
    n_edges = complex_.num(1)
    if isinstance(lengths, dict):
        arr = np.zeros(n_edges)
        for e, (u, v) in enumerate(complex_.simplices[1]):
            key = (u, v) if (u, v) in lengths else (v, u)
            arr[e] = lengths[key]
        lengths = arr
    lengths = np.asarray(lengths, dtype=float)
    if lengths.shape != (n_edges,):
        raise ValueError(f"expected {n_edges} edge lengths, got {lengths.shape}")
    if np.any(lengths <= 0):
        raise DegenerateSimplex("non-positive edge length")

    if mode == "vertex_defect":
        if n != 2:
            raise ModeUnsupported("vertex_defect curvature is defined for n = 2 only")
        constant = None
    elif mode == "constant":
        if constant is None:
            raise ValueError("constant mode requires a curvature constant")
        constant = float(constant)
    else:
        raise ValueError(f"unknown curvature mode {mode!r}")

    tables = _squared_distance_tables(complex_, lengths)

    volumes = [np.ones(complex_.num(0))]
    radius2 = [np.zeros(complex_.num(0))]
    bary = [np.ones((complex_.num(0), 1))]
    for r in range(1, n + 1):
        vol2 = (
            tables[r][:, 0, 1]
            if r == 1
            else _cayley_menger_volumes(tables[r], r)
        )
        bad = np.nonzero(vol2 <= 0)[0]
        if bad.size:
            raise DegenerateSimplex(
                f"degree-{r} simplex {complex_.simplices[r][bad[0]]} has "
                f"non-positive squared volume {vol2[bad[0]]:.3e}"
            )
        volumes.append(np.sqrt(vol2))
        b, r2 = _circumcenters(tables[r], r)
        bary.append(b)
        radius2.append(r2)

    # Signed orthoscheme recursion for dual volumes, top degree downward.
    w = [None] * (n + 1)
    w[n] = np.ones(complex_.num(n))
    for r in range(n - 1, -1, -1):
        faces, cofs, pos = _coface_incidence(complex_, r)
        h2 = radius2[r + 1][cofs] - radius2[r][faces]
        h = np.sqrt(np.maximum(h2, 0.0))
        sign = np.sign(bary[r + 1][cofs, pos])
        w[r] = np.zeros(complex_.num(r))
        np.add.at(w[r], faces, sign * h * w[r + 1][cofs])
    dual = [w[r] / math.factorial(n - r) for r in range(n + 1)]

    for r in range(n + 1):
        tol = _DUAL_TOL * max(dual[r].max(), 1.0)
        bad = np.nonzero(dual[r] <= tol)[0]
        if bad.size:
            raise NegativeDualVolume(
                f"dual volume of degree-{r} simplex "
                f"{complex_.simplices[r][bad[0]]} is {dual[r][bad[0]]:.3e}; "
                "mesh is not well-centered enough for the diagonal star"
            )

    mass = tuple(dual[r] / volumes[r] for r in range(n + 1))

    defect = curvature = None
    if n == 2:
        angles = _triangle_angles(tables[2])
        defect = np.full(complex_.num(0), 2.0 * math.pi)
        tris = np.asarray(complex_.simplices[2])
        np.subtract.at(defect, tris.ravel(), angles.ravel())
        chi = euler_characteristic(complex_)
        total = defect.sum()
        if abs(total - 2.0 * math.pi * chi) > 1e-9 * max(1.0, abs(2.0 * math.pi * chi)):
            raise AssertionError(
                f"Gauss-Bonnet violated: sum of defects {total:.12e} vs "
                f"2*pi*chi = {2.0 * math.pi * chi:.12e}"
            )
        curvature = defect / dual[0]

    return MetricComplex(
        complex=complex_,
        edge_lengths=lengths,
        volumes=tuple(volumes),
        dual_volumes=tuple(dual),
        mass=mass,
        circum_radius2=tuple(radius2),
        circum_bary=tuple(bary),
        vertex_defect=defect,
        vertex_curvature=curvature,
        curvature_mode=mode,
        curvature_constant=constant,
    )


def conformal_rescale(metric: MetricComplex, factor) -> MetricComplex:
    """Discrete conformal change of metric: l_uv -> exp((f_u + f_v)/2) l_uv.

    Only vertex_defect metrics can be rescaled; a conformal factor does not
    preserve constant curvature in general, so constant mode is rejected.
    """
    if metric.curvature_mode == "constant":
        raise ModeConflict(
            "conformal rescale of a constant-curvature metric; rebuild with "
            "vertex_defect mode first"
        )
    f = np.asarray(factor, dtype=float)
    if f.shape != (metric.complex.num(0),):
        raise ValueError("conformal factor must assign one value per vertex")
    edges = np.asarray(metric.complex.simplices[1])
    scale = np.exp(0.5 * (f[edges[:, 0]] + f[edges[:, 1]]))
    return build_metric(
        metric.complex, metric.edge_lengths * scale, mode="vertex_defect"
    )
