"""Deterministic mesh recipes for the test manifolds.

Every recipe returns a :class:`MeshBundle` holding the complex, per-edge
lengths, provenance (:class:`ManifoldRecipe`) and, where available, vertex
coordinates (an embedding for the spheres, parameter coordinates for the
tori).  Identical parameters produce bit-identical meshes, and every recipe
output passes both the complex validation and the positive-dual-volume
check of the metric build.

Construction notes
------------------
* Tori use an offset-row lattice (alternate lines shifted by half a step),
  which makes every triangle acute isoceles.  Splitting squares along
  diagonals would put circumcenters exactly on the hypotenuses and yield
  zero dual edge volumes, so that layout is unusable for the diagonal star.
  The line count along the offset axis must be even.
* The genus-2 surface is meshed from the 16 equilateral hyperbolic
  triangles of the regular {3,8} tiling of the Bolza surface (octagon
  center, side midpoints, corner class), refined by geodesic midpoint
  subdivision in the Poincare disk before the side-pairing identification.
  Refining the raw octagon fan gives mostly obtuse triangles; the
  equilateral base keeps every triangle acute at all levels.
* The 3-torus is the quotient of the body-centered cubic lattice by
  p * (e1, e2, (1/2,1/2,1/2)); its Delaunay tetrahedra have their
  circumcenters at the barycenters, so all dual volumes are positive.
* sphere3 level 1 retriangulates the once-subdivided 600-cell vertex set by
  a 4-d convex hull after a deterministic tangential jitter and three Lloyd
  smoothing sweeps; the unperturbed subdivision is exactly cospherical and
  has zero dual volumes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NegativeDualVolume, RecipeError
from .geometry import MetricComplex, build_metric
from .simplicial import SimplicialComplex, build_complex

__all__ = [
    "ManifoldRecipe",
    "MeshBundle",
    "icosphere",
    "flat_torus2",
    "warped_torus",
    "hyperbolic_genus2",
    "flat_torus3",
    "sphere3",
    "RECIPES",
]

_PHI = (1.0 + math.sqrt(5.0)) / 2.0


@dataclass(frozen=True, eq=False)
class ManifoldRecipe:
    """Provenance of a generated mesh: name, parameters, curvature."""

    name: str
    params: dict
    curvature_constant: float | None
    warp_profile: np.ndarray | None = None
    periods: tuple | None = None

    def label(self) -> str:
        args = ", ".join(
            f"{k}={v}" for k, v in self.params.items() if not isinstance(v, (list, np.ndarray))
        )
        return f"{self.name}({args})"


@dataclass(eq=False)
class MeshBundle:
    """A generated mesh: complex, edge lengths, recipe, optional coordinates."""

    complex: SimplicialComplex
    edge_lengths: np.ndarray
    recipe: ManifoldRecipe
    vertices: np.ndarray | None = None
    _metrics: dict = field(default_factory=dict, repr=False)

    def metric(self, mode: str = "auto", constant: float | None = None) -> MetricComplex:
        """Metric complex for this mesh; instances are cached per mode.

        mode "auto" uses the recipe's curvature constant when it has one and
        vertex-defect curvature otherwise.
        """
        if mode == "auto":
            if self.recipe.curvature_constant is not None:
                mode, constant = "constant", self.recipe.curvature_constant
            else:
                mode = "vertex_defect"
        if mode == "constant" and constant is None:
            constant = self.recipe.curvature_constant
            if constant is None:
                raise ValueError("recipe has no curvature constant; pass one")
        key = (mode, constant)
        if key not in self._metrics:
            self._metrics[key] = build_metric(
                self.complex, self.edge_lengths, mode=mode, constant=constant
            )
        return self._metrics[key]

    def __repr__(self) -> str:
        return f"MeshBundle({self.recipe.label()}, counts={self.complex.counts()})"


def _edge_length_array(complex_: SimplicialComplex, table: dict) -> np.ndarray:
    out = np.zeros(complex_.num(1))
    for e, (u, v) in enumerate(complex_.simplices[1]):
        out[e] = table[(u, v)]
    return out


# ---------------------------------------------------------------------------
# icosphere


_ICO_FACES = [
    (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
    (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
    (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
    (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
]


def _icosahedron_vertices() -> np.ndarray:
    t = _PHI
    v = np.array(
        [
            (-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
            (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
            (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1),
        ],
        dtype=float,
    )
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def icosphere(level: int) -> MeshBundle:
    """Unit 2-sphere: icosahedron subdivided ``level`` times, vertices
    radially projected; edge lengths are chordal distances."""
    if not (0 <= level <= 6):
        raise RecipeError(f"icosphere level must be in 0..6, got {level}")
    verts = list(_icosahedron_vertices())
    faces = list(_ICO_FACES)
    for _ in range(level):
        cache: dict[tuple[int, int], int] = {}

        def midpoint(a: int, b: int) -> int:
            key = (a, b) if a < b else (b, a)
            if key not in cache:
                m = verts[a] + verts[b]
                verts.append(m / np.linalg.norm(m))
                cache[key] = len(verts) - 1
            return cache[key]

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces

    coords = np.array(verts)
    complex_ = build_complex(faces)
    assert complex_.counts() == (10 * 4**level + 2, 30 * 4**level, 20 * 4**level)
    lengths = np.array(
        [np.linalg.norm(coords[u] - coords[v]) for u, v in complex_.simplices[1]]
    )
    recipe = ManifoldRecipe("icosphere", {"level": level}, curvature_constant=1.0)
    bundle = MeshBundle(complex_, lengths, recipe, vertices=coords)
    bundle.metric()  # validate dual volumes now
    return bundle


# ---------------------------------------------------------------------------
# offset-row lattice shared by the flat and warped 2-tori


def _offset_lattice(n_lines: int, m: int):
    """Triangulated torus lattice with alternate lines shifted half a step.

    Lines are indexed by ``a`` (odd lines offset by half a position step),
    positions within a line by ``b``; vertex id = a*m + b.  Returns the cell
    list and the per-edge displacement {(u, v): (d_line, d_pos_halfsteps)}
    measured from u to v.
    """
    if n_lines % 2:
        raise RecipeError(
            f"offset axis needs an even line count, got {n_lines}"
        )
    if n_lines < 3 or m < 3:
        raise RecipeError("lattice requires at least 3 lines and 3 positions")

    def vid(a: int, b: int) -> int:
        return (a % n_lines) * m + (b % m)

    cells = []
    disp: dict[tuple[int, int], tuple[int, int]] = {}

    def edge(u_ab, v_ab):
        (ua, ub), (va, vb) = u_ab, v_ab
        u, v = vid(ua, ub), vid(va, vb)
        da = va - ua
        # absolute position in half-steps
        db = (2 * vb + (va % 2)) - (2 * ub + (ua % 2))
        if u > v:
            u, v, da, db = v, u, -da, -db
        if (u, v) in disp:
            if disp[(u, v)] != (da, db):
                raise RecipeError("inconsistent lattice displacement; p or q too small")
        else:
            disp[(u, v)] = (da, db)

    for a in range(n_lines):
        for b in range(m):
            if a % 2 == 0:
                tri1 = ((a, b), (a, b + 1), (a + 1, b))
                tri2 = ((a + 1, b), (a, b + 1), (a + 1, b + 1))
            else:
                tri1 = ((a, b), (a, b + 1), (a + 1, b + 1))
                tri2 = ((a, b), (a + 1, b + 1), (a + 1, b))
            for tri in (tri1, tri2):
                cells.append(tuple(vid(x, y) for x, y in tri))
                for i, j in ((0, 1), (1, 2), (0, 2)):
                    edge(tri[i], tri[j])
    return cells, disp


def flat_torus2(p: int, q: int, aspect: float = 1.0) -> MeshBundle:
    """Flat 2-torus on a p x q grid with cell side ratio ``aspect``.

    Steps are (aspect, 1) in (x, y); the offset axis is chosen so the
    isoceles bases lie along the shorter step, which keeps every triangle
    acute for any admissible aspect.
    """
    if not (isinstance(p, int) and isinstance(q, int)) or p < 3 or q < 3:
        raise RecipeError(f"flat_torus2 requires integer p, q >= 3, got ({p}, {q})")
    if not (1.0 / 3.0 <= aspect <= 3.0):
        raise RecipeError(f"aspect {aspect} outside [1/3, 3]")
    sx, sy = float(aspect), 1.0
    if aspect >= 1.0:
        # lines along x (indexed by i), offset applied to y positions
        if p % 2:
            raise RecipeError(f"flat_torus2 with aspect >= 1 requires even p, got {p}")
        cells, disp = _offset_lattice(p, q)
        axis_steps = (sx, sy)  # (line step, position step)
    else:
        if q % 2:
            raise RecipeError(f"flat_torus2 with aspect < 1 requires even q, got {q}")
        cells, disp = _offset_lattice(q, p)
        axis_steps = (sy, sx)

    lengths_table = {
        e: math.hypot(da * axis_steps[0], 0.5 * db * axis_steps[1])
        for e, (da, db) in disp.items()
    }
    complex_ = build_complex(cells)
    lengths = _edge_length_array(complex_, lengths_table)

    n_lines = p if aspect >= 1.0 else q
    m = q if aspect >= 1.0 else p
    coords = np.zeros((n_lines * m, 2))
    for a in range(n_lines):
        for b in range(m):
            line_c = a * axis_steps[0]
            pos_c = (b + 0.5 * (a % 2)) * axis_steps[1]
            xy = (line_c, pos_c) if aspect >= 1.0 else (pos_c, line_c)
            coords[a * m + b] = xy
    periods = (p * sx, q * sy)
    recipe = ManifoldRecipe(
        "flat_torus2",
        {"p": p, "q": q, "aspect": aspect},
        curvature_constant=0.0,
        periods=periods,
    )
    bundle = MeshBundle(complex_, lengths, recipe, vertices=coords)
    bundle.metric()
    return bundle


def warped_torus(p: int, q: int, warp) -> MeshBundle:
    """Warped product S^1 x_f S^1 with metric dt^2 + f(t)^2 dtheta^2.

    ``warp`` gives the p samples f_i = f(t = i) > 0, period p; between
    samples f is linearly interpolated.  Edge lengths use the metric at the
    parameter-space edge midpoint: constant-t edges have length f at their
    own column, diagonal edges evaluate f halfway between columns.
    """
    if not (isinstance(p, int) and isinstance(q, int)) or p < 3 or q < 3:
        raise RecipeError(f"warped_torus requires integer p, q >= 3, got ({p}, {q})")
    if p % 2:
        raise RecipeError(f"warped_torus requires even p, got {p}")
    f = np.asarray(warp, dtype=float)
    if f.shape != (p,):
        raise RecipeError(f"expected {p} warp samples, got shape {f.shape}")
    if np.any(f <= 0):
        i = int(np.argmin(f))
        raise RecipeError(f"warp must be strictly positive; f[{i}] = {f[i]}")

    cells, disp = _offset_lattice(p, q)  # lines = columns of constant t
    lengths_table = {}
    for (u, v), (da, db) in disp.items():
        i = u // q  # column of the tail vertex
        if da == 0:
            lengths_table[(u, v)] = f[i] * 0.5 * abs(db)
        else:
            t_mid = i + 0.5 * da
            f_mid = 0.5 * (f[i] + f[(i + da) % p])
            lengths_table[(u, v)] = math.hypot(da, f_mid * 0.5 * db)
    complex_ = build_complex(cells)
    lengths = _edge_length_array(complex_, lengths_table)

    coords = np.zeros((p * q, 2))
    for a in range(p):
        for b in range(q):
            coords[a * q + b] = (a, b + 0.5 * (a % 2))
    recipe = ManifoldRecipe(
        "warped_torus",
        {"p": p, "q": q, "warp": [float(x) for x in f]},
        curvature_constant=None,
        warp_profile=f,
        periods=(float(p), float(q)),
    )
    bundle = MeshBundle(complex_, lengths, recipe, vertices=coords)
    try:
        bundle.metric()
    except NegativeDualVolume as exc:
        raise NegativeDualVolume(
            f"warped_torus(p={p}, q={q}) with warp range "
            f"[{f.min():.4g}, {f.max():.4g}] is not well-centered: {exc}"
        ) from exc
    return bundle


# ---------------------------------------------------------------------------
# genus-2 hyperbolic surface


def _mobius_to(z, a):
    return (z - a) / (1.0 - np.conj(a) * z)


def _mobius_from(w, a):
    return (w + a) / (1.0 + np.conj(a) * w)


def _hyp_midpoint(z, w):
    u = _mobius_to(w, z)
    r = abs(u)
    if r == 0.0:
        return z
    half = math.tanh(0.5 * math.atanh(r))
    return _mobius_from(half * u / r, z)


def _hyp_dist(z, w) -> float:
    num = 2.0 * abs(z - w) ** 2
    den = (1.0 - abs(z) ** 2) * (1.0 - abs(w) ** 2)
    return math.acosh(1.0 + num / den)


_OCT_PAIRING = {0: 2, 2: 0, 1: 3, 3: 1, 4: 6, 6: 4, 5: 7, 7: 5}


def hyperbolic_genus2(level: int) -> MeshBundle:
    """Closed genus-2 surface of curvature -1 from the regular octagon.

    The octagon (vertex angle pi/4, all corners identified) carries the 16
    equilateral triangles of the {3,8} tiling: center, side midpoints and
    the corner class.  ``level`` rounds of geodesic midpoint subdivision are
    applied in the Poincare disk, then the sides are identified by the
    a b a' b' c d c' d' pairing.  Level 0 is rejected: the unrefined base
    has doubled edges after identification and is not simplicial.
    """
    if level not in (1, 2, 3):
        raise RecipeError(
            f"hyperbolic_genus2 level must be 1, 2 or 3, got {level}; level 0 "
            "is too coarse (identified base is not a simplicial complex)"
        )
    big_r = math.acosh(1.0 / math.tan(math.pi / 8.0) ** 2)
    disk_r = math.tanh(big_r / 2.0)
    corners = [disk_r * np.exp(2j * math.pi * k / 8.0) for k in range(8)]
    mids = [_hyp_midpoint(corners[k], corners[(k + 1) % 8]) for k in range(8)]

    tris = []
    for k in range(8):
        tris.append((0.0j, mids[k], mids[(k + 1) % 8]))
        tris.append((corners[(k + 1) % 8], mids[k], mids[(k + 1) % 8]))
    for _ in range(level):
        refined = []
        for a, b, c in tris:
            mab, mbc, mca = _hyp_midpoint(a, b), _hyp_midpoint(b, c), _hyp_midpoint(c, a)
            refined += [(a, mab, mca), (mab, b, mbc), (mca, mbc, c), (mab, mbc, mca)]
        tris = refined

    def key(z):
        return (round(z.real, 10), round(z.imag, 10))

    vid: dict = {}
    pts: list = []
    cells_disk = []
    for t in tris:
        ids = []
        for z in t:
            k = key(z)
            if k not in vid:
                vid[k] = len(pts)
                pts.append(z)
            ids.append(vid[k])
        cells_disk.append(tuple(ids))

    # boundary vertices lie at dyadic arc parameters along the sides
    nseg = 2 ** (level + 1)
    side_param: dict[int, tuple[int, int]] = {}
    corner_ids = set()
    for k in range(8):
        a, b = corners[k], corners[(k + 1) % 8]
        stack = [(a, b, 0, nseg)]
        while stack:
            z, w, i0, i1 = stack.pop()
            if i1 - i0 <= 1:
                continue
            m = _hyp_midpoint(z, w)
            mid_i = (i0 + i1) // 2
            side_param[vid[key(m)]] = (k, mid_i)
            stack.append((z, m, i0, mid_i))
            stack.append((m, w, mid_i, i1))
        corner_ids.add(vid[key(a)])

    canon: dict[int, tuple] = {c: ("corner",) for c in corner_ids}
    for v, (k, i) in side_param.items():
        canon[v] = min(("side", k, i), ("side", _OCT_PAIRING[k], nseg - i))
    labels: dict[tuple, int] = {}
    remap = {}
    for v in range(len(pts)):
        lab = canon.get(v, ("interior", v))
        if lab not in labels:
            labels[lab] = len(labels)
        remap[v] = labels[lab]
    cells = [tuple(remap[v] for v in c) for c in cells_disk]

    complex_ = build_complex(cells)
    lengths_table: dict[tuple[int, int], float] = {}
    for disk_cell, cell in zip(cells_disk, cells):
        for i, j in ((0, 1), (1, 2), (0, 2)):
            u, v = cell[i], cell[j]
            e = (u, v) if u < v else (v, u)
            d = _hyp_dist(pts[disk_cell[i]], pts[disk_cell[j]])
            prev = lengths_table.get(e)
            if prev is None:
                lengths_table[e] = d
            elif abs(prev - d) > 1e-9:
                raise AssertionError("side pairing broke length symmetry")
    lengths = _edge_length_array(complex_, lengths_table)

    octagon_side = 2.0 * math.acosh(1.0 / math.tan(math.pi / 8.0))
    recipe = ManifoldRecipe(
        "hyperbolic_genus2",
        {"level": level, "octagon_side": octagon_side},
        curvature_constant=-1.0,
    )
    bundle = MeshBundle(complex_, lengths, recipe, vertices=None)
    bundle.metric()
    return bundle


# ---------------------------------------------------------------------------
# flat 3-torus (body-centered lattice quotient)


def flat_torus3(p: int) -> MeshBundle:
    """Flat 3-torus with p^3 vertices on the body-centered cubic lattice.

    The quotient is by p*(e1, e2, (1/2,1/2,1/2)); the Delaunay tetrahedra of
    the BCC lattice have their circumcenters at their barycenters, which
    makes every circumcentric dual volume strictly positive.
    """
    if not isinstance(p, int) or p < 3:
        raise RecipeError(f"flat_torus3 requires integer p >= 3, got {p}")
    basis = np.array([[1.0, 0.0, 0.5], [0.0, 1.0, 0.5], [0.0, 0.0, 0.5]])
    basis_inv = np.linalg.inv(basis)

    def to_int(vec) -> tuple[int, ...]:
        lat = basis_inv @ np.asarray(vec)
        out = tuple(int(round(x)) for x in lat)
        assert np.allclose(lat, out, atol=1e-9)
        return out

    axes = [np.array(a, dtype=float) for a in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
    diagonals = [
        0.5 * np.array(s, dtype=float)
        for s in itertools.product((1, -1), repeat=3)
    ]
    tet_patterns = []  # (axis displacement, ring pair displacements) in lattice ints
    for axis in axes:
        ring = [d for d in diagonals if abs(float(d @ axis) - 0.5) < 1e-12]
        # order the four surrounding points cyclically around the axis
        perp = [d - (d @ axis) * axis for d in ring]
        ref = perp[0] / np.linalg.norm(perp[0])
        nrm = np.cross(axis, ref)
        ang = [math.atan2(float(v @ nrm), float(v @ ref)) for v in perp]
        order = np.argsort(ang)
        ring = [ring[i] for i in order]
        for i in range(4):
            tet_patterns.append(
                (to_int(axis), to_int(ring[i]), to_int(ring[(i + 1) % 4]))
            )

    def vid(i: int, j: int, k: int) -> int:
        return ((i % p) * p + (j % p)) * p + (k % p)

    tets = set()
    for i in range(p):
        for j in range(p):
            for k in range(p):
                u = (i, j, k)
                for axis_d, d1, d2 in tet_patterns:
                    cell = (
                        vid(*u),
                        vid(i + axis_d[0], j + axis_d[1], k + axis_d[2]),
                        vid(i + d1[0], j + d1[1], k + d1[2]),
                        vid(i + d2[0], j + d2[1], k + d2[2]),
                    )
                    tets.add(tuple(sorted(cell)))
    tets = sorted(tets)
    assert len(tets) == 6 * p**3

    complex_ = build_complex(tets)

    # edge lengths from true lattice displacements (1 for cubic, sqrt(3)/2
    # for diagonal neighbors); recovered per edge via the minimum image
    coords = np.zeros((p**3, 3))
    for i in range(p):
        for j in range(p):
            for k in range(p):
                coords[vid(i, j, k)] = basis @ np.array([i, j, k], dtype=float)
    gens = (basis * p).T  # rows are the quotient lattice generators
    shifts = np.array(
        [s @ gens for s in itertools.product((-1, 0, 1), repeat=3)]
    )
    lengths = np.zeros(complex_.num(1))
    for e, (u, v) in enumerate(complex_.simplices[1]):
        delta = coords[v] - coords[u] + shifts
        lengths[e] = np.sqrt((delta**2).sum(axis=1)).min()

    recipe = ManifoldRecipe(
        "flat_torus3",
        {"p": p, "lattice_basis": [[float(x) for x in row] for row in gens]},
        curvature_constant=0.0,
    )
    bundle = MeshBundle(complex_, lengths, recipe, vertices=coords)
    bundle.metric()
    return bundle


# ---------------------------------------------------------------------------
# round 3-sphere (600-cell)


def _even_permutations4():
    perms = []
    for perm in itertools.permutations(range(4)):
        sign = 1
        lst = list(perm)
        for i in range(4):
            for j in range(i + 1, 4):
                if lst[i] > lst[j]:
                    sign = -sign
        if sign == 1:
            perms.append(perm)
    return perms


def _cell600_vertices() -> np.ndarray:
    pts = set()
    for i in range(4):
        for s in (1.0, -1.0):
            v = [0.0, 0.0, 0.0, 0.0]
            v[i] = s
            pts.add(tuple(v))
    for signs in itertools.product((0.5, -0.5), repeat=4):
        pts.add(signs)
    base = (_PHI / 2.0, 0.5, 1.0 / (2.0 * _PHI), 0.0)
    for perm in _even_permutations4():
        arranged = tuple(base[j] for j in perm)
        for signs in itertools.product((1.0, -1.0), repeat=4):
            pts.add(tuple(round(s * x, 12) for s, x in zip(signs, arranged)))
    arr = np.array(sorted(pts))
    arr /= np.linalg.norm(arr, axis=1, keepdims=True)
    assert arr.shape == (120, 4)
    return arr


def _cell600_complex():
    verts = _cell600_vertices()
    d2 = ((verts[:, None, :] - verts[None, :, :]) ** 2).sum(axis=-1)
    target = (1.0 / _PHI) ** 2
    adj = np.abs(d2 - target) < 1e-9
    np.fill_diagonal(adj, False)
    nbrs = [set(np.nonzero(adj[i])[0]) for i in range(len(verts))]
    tets = []
    for u in range(len(verts)):
        for v in sorted(nbrs[u]):
            if v <= u:
                continue
            common = sorted(w for w in (nbrs[u] & nbrs[v]) if w > v)
            for a, b in itertools.combinations(common, 2):
                if b in nbrs[a]:
                    tets.append((u, v, a, b))
    assert len(tets) == 600
    return verts, tets


def sphere3(level: int) -> MeshBundle:
    """Unit 3-sphere: the 600-cell (level 0) or a Delaunay retriangulation
    of its once-subdivided vertex set (level 1); chordal edge lengths.

    The raw midpoint subdivision of the 600-cell is exactly cospherical
    (regular octahedra inside every tetrahedron) and has zero dual volumes,
    so level 1 applies a deterministic tangential jitter plus three Lloyd
    sweeps before triangulating by 4-d convex hull.
    """
    if level not in (0, 1):
        raise RecipeError(f"sphere3 level must be 0 or 1, got {level}")
    verts, tets = _cell600_complex()
    if level == 0:
        complex_ = build_complex(tets)
        assert complex_.counts() == (120, 720, 1200, 600)
        coords = verts
    else:
        from scipy.spatial import ConvexHull

        mids = []
        seen = set()
        for t in tets:
            for a, b in itertools.combinations(t, 2):
                key = (a, b) if a < b else (b, a)
                if key not in seen:
                    seen.add(key)
                    m = verts[a] + verts[b]
                    mids.append(m / np.linalg.norm(m))
        pts = np.vstack([verts, np.array(mids)])
        rng = np.random.default_rng(20240817)
        g = rng.standard_normal(pts.shape)
        g -= (g * pts).sum(axis=1, keepdims=True) * pts
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        pts = pts + 0.02 * g
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        for _ in range(3):
            hull = ConvexHull(pts)
            nbr = [set() for _ in range(len(pts))]
            for s in hull.simplices:
                for i in s:
                    nbr[i].update(int(x) for x in s)
            smoothed = np.empty_like(pts)
            for i in range(len(pts)):
                ring = sorted(nbr[i] - {i})
                m = pts[ring].mean(axis=0)
                smoothed[i] = m / np.linalg.norm(m)
            pts = smoothed
        hull = ConvexHull(pts)
        complex_ = build_complex([tuple(int(x) for x in s) for s in hull.simplices])
        coords = pts

    lengths = np.array(
        [np.linalg.norm(coords[u] - coords[v]) for u, v in complex_.simplices[1]]
    )
    recipe = ManifoldRecipe("sphere3", {"level": level}, curvature_constant=1.0)
    bundle = MeshBundle(complex_, lengths, recipe, vertices=coords)
    bundle.metric()
    return bundle


RECIPES = {
    "icosphere": icosphere,
    "flat_torus2": flat_torus2,
    "warped_torus": warped_torus,
    "hyperbolic_genus2": hyperbolic_genus2,
    "flat_torus3": flat_torus3,
    "sphere3": sphere3,
}
