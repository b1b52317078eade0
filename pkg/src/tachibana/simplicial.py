"""Oriented simplicial complexes with exact integer boundary operators.

A complex is built from its top-dimensional cells only; all lower faces are
generated by closure.  Simplices are stored as sorted vertex tuples, and the
boundary of ``[v0, ..., vr]`` alternates signs ``(-1)**i`` on omission of the
i-th vertex, which makes the chain-complex identity d(d(.)) = 0 mechanical.
Top cells additionally carry a +-1 orientation sign, resolved by propagation
from a seed cell so that induced orientations on shared faces are opposite.

Homology ranks are computed exactly over the integers (Smith-normal-form
style elimination, rank only), which serves as the independent oracle for
every spectral Betti computation downstream.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd

import numpy as np
import scipy.sparse as sp

from .errors import NonManifold, NonOrientable

__all__ = [
    "SimplicialComplex",
    "build_complex",
    "euler_characteristic",
    "homology_ranks",
    "integer_rank",
]


@dataclass(frozen=True, eq=False)
class SimplicialComplex:
    """Closed oriented simplicial pseudomanifold.

    Attributes
    ----------
    dimension : top degree n.
    simplices : per degree r, tuple of sorted vertex tuples; the position of
        a tuple is the simplex id used by all matrices and cochains.
    boundary : per degree r in 1..n, sparse integer matrix mapping r-chains
        to (r-1)-chains (shape N_{r-1} x N_r).  The degree-n columns absorb
        the resolved cell orientations, so the all-ones n-chain is the
        fundamental cycle.
    cell_signs : resolved orientation sign per top cell relative to its
        sorted vertex tuple.
    vertex_ids : external vertex ids, indexed by the dense internal id.
    """

    dimension: int
    simplices: tuple[tuple[tuple[int, ...], ...], ...]
    boundary: tuple[sp.csr_matrix, ...]
    cell_signs: np.ndarray
    vertex_ids: tuple[int, ...]
    _index: tuple[dict, ...] = field(repr=False, default=())

    def counts(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.simplices)

    def num(self, r: int) -> int:
        return len(self.simplices[r])

    def simplex_index(self, r: int, simplex: tuple[int, ...]) -> int:
        return self._index[r][tuple(sorted(simplex))]

    @property
    def edges(self) -> tuple[tuple[int, ...], ...]:
        return self.simplices[1]

    def __repr__(self) -> str:  # keep dataclass repr from dumping matrices
        return f"SimplicialComplex(n={self.dimension}, counts={self.counts()})"


def _permutation_sign(seq) -> int:
    """Sign of the permutation sorting ``seq`` (distinct entries)."""
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def build_complex(top_cells) -> SimplicialComplex:
    """Build a closed oriented complex from oriented top cells.

    Every (n-1)-face must bound exactly two cells (NonManifold otherwise)
    and the cells must admit a globally consistent orientation
    (NonOrientable otherwise).  Input cell orientations are used only to
    seed the propagation.
    """
    cells = [tuple(c) for c in top_cells]
    if not cells:
        raise ValueError("top_cells is empty")
    n = len(cells[0]) - 1
    if n < 1:
        raise ValueError("top cells must have at least 2 vertices")
    for c in cells:
        if len(c) != n + 1:
            raise ValueError(f"cell {c} does not have {n + 1} vertices")
        if len(set(c)) != n + 1:
            raise ValueError(f"cell {c} has repeated vertices")

    # Dense 0-based reindexing; external ids kept for metadata.
    ext_ids = sorted({v for c in cells for v in c})
    to_dense = {v: i for i, v in enumerate(ext_ids)}
    cells = [tuple(to_dense[v] for v in c) for c in cells]

    # Input orientation relative to the sorted tuple.
    seed_signs = [_permutation_sign(c) for c in cells]
    sorted_cells = [tuple(sorted(c)) for c in cells]
    if len(set(sorted_cells)) != len(sorted_cells):
        raise ValueError("duplicate top cells")

    # Face closure, degree by degree.
    simplices: list[list[tuple[int, ...]]] = [[] for _ in range(n + 1)]
    simplices[n] = sorted_cells
    for r in range(n, 0, -1):
        faces = {s[:i] + s[i + 1:] for s in simplices[r] for i in range(r + 1)}
        simplices[r - 1] = sorted(faces)
    index = [
        {s: i for i, s in enumerate(simplices[r])} for r in range(n + 1)
    ]

    # Closed pseudomanifold check plus face adjacency of the top cells.
    cofaces: dict[int, list[tuple[int, int]]] = {}
    for ci, s in enumerate(sorted_cells):
        for omit in range(n + 1):
            f = index[n - 1][s[:omit] + s[omit + 1:]]
            cofaces.setdefault(f, []).append((ci, omit))
    for f, inc in cofaces.items():
        if len(inc) != 2:
            raise NonManifold(
                f"face {simplices[n - 1][f]} bounds {len(inc)} cells, expected 2"
            )

    # Orientation propagation: induced signs on a shared face must differ.
    signs = np.zeros(len(cells), dtype=np.int64)
    signs[0] = seed_signs[0]
    queue = [0]
    adjacency: dict[int, list[tuple[int, int, int]]] = {i: [] for i in range(len(cells))}
    for f, ((c1, o1), (c2, o2)) in cofaces.items():
        adjacency[c1].append((c2, o1, o2))
        adjacency[c2].append((c1, o2, o1))
    while queue:
        c = queue.pop()
        for c2, omit_c, omit_c2 in adjacency[c]:
            forced = -signs[c] * ((-1) ** omit_c) * ((-1) ** omit_c2)
            if signs[c2] == 0:
                signs[c2] = forced
                queue.append(c2)
            elif signs[c2] != forced:
                raise NonOrientable(
                    "orientation propagation contradicts itself at cell "
                    f"{simplices[n][c2]}"
                )
    if np.any(signs == 0):
        raise NonManifold("top cells are not face-connected")

    # Boundary matrices on the canonical (sorted) bases; resolved signs are
    # folded into the degree-n columns.
    boundary = []
    for r in range(1, n + 1):
        rows, cols, vals = [], [], []
        for si, s in enumerate(simplices[r]):
            col_sign = signs[si] if r == n else 1
            for omit in range(r + 1):
                rows.append(index[r - 1][s[:omit] + s[omit + 1:]])
                cols.append(si)
                vals.append(col_sign * ((-1) ** omit))
        mat = sp.csr_matrix(
            (vals, (rows, cols)),
            shape=(len(simplices[r - 1]), len(simplices[r])),
            dtype=np.int64,
        )
        boundary.append(mat)

    return SimplicialComplex(
        dimension=n,
        simplices=tuple(tuple(s) for s in simplices),
        boundary=tuple(boundary),
        cell_signs=signs,
        vertex_ids=tuple(ext_ids),
        _index=tuple(index),
    )


def euler_characteristic(complex_: SimplicialComplex) -> int:
    return sum((-1) ** r * complex_.num(r) for r in range(complex_.dimension + 1))


def integer_rank(matrix: sp.spmatrix) -> int:
    """Exact rank of an integer matrix over the rationals.

    Fraction-free sparse Gaussian elimination with arbitrary-precision
    Python integers: a pivot step replaces row j by
    ``(p/g)*row_j - (a/g)*row_pivot`` with ``g = gcd(p, a)`` and then divides
    row j by its content, so entries never overflow and the rank over Q is
    preserved.  Pivots are chosen smallest-magnitude first with a Markowitz
    fill tie-break.  Only the rank is needed, so elimination stops as soon
    as the matrix empties.
    """
    coo = sp.coo_matrix(matrix)
    rows: dict[int, dict[int, int]] = {}
    col_rows: dict[int, set[int]] = {}
    for i, j, v in zip(coo.row, coo.col, coo.data):
        v = int(v)
        if v == 0:
            continue
        r = rows.setdefault(int(i), {})
        r[int(j)] = r.get(int(j), 0) + v
    for i in list(rows):
        row = {j: v for j, v in rows[i].items() if v != 0}
        if row:
            rows[i] = row
            for j in row:
                col_rows.setdefault(j, set()).add(i)
        else:
            del rows[i]

    rank = 0
    while col_rows:
        # Pivot column: fewest rows; pivot row in it: smallest |value|, then
        # shortest row.  Deterministic tie-breaks keep runs reproducible.
        pc = min(col_rows, key=lambda j: (len(col_rows[j]), j))
        pr = min(
            col_rows[pc],
            key=lambda i: (abs(rows[i][pc]) != 1, abs(rows[i][pc]), len(rows[i]), i),
        )
        pivot_row = rows.pop(pr)
        p = pivot_row[pc]
        for j in pivot_row:
            col_rows[j].discard(pr)
            if not col_rows[j]:
                del col_rows[j]
        rank += 1

        targets = list(col_rows.get(pc, ()))
        for ti in targets:
            row = rows[ti]
            a = row[pc]
            g = gcd(p, a)
            mul_t, mul_p = p // g, a // g
            if mul_t != 1:
                for j in row:
                    row[j] *= mul_t
            for j, v in pivot_row.items():
                new = row.get(j, 0) - mul_p * v
                if new == 0:
                    if j in row:
                        del row[j]
                        col_rows[j].discard(ti)
                        if not col_rows[j]:
                            del col_rows[j]
                else:
                    if j not in row:
                        col_rows.setdefault(j, set()).add(ti)
                    row[j] = new
            if not row:
                del rows[ti]
                continue
            content = 0
            for v in row.values():
                content = gcd(content, v)
                if content == 1:
                    break
            if content > 1:
                for j in row:
                    row[j] //= content
    return rank


@lru_cache(maxsize=32)
def _ranks_cached(complex_: SimplicialComplex) -> tuple[int, ...]:
    return tuple(integer_rank(b) for b in complex_.boundary)


def homology_ranks(complex_: SimplicialComplex) -> tuple[int, ...]:
    """Betti numbers b_0..b_n from exact integer ranks of the boundaries.

    b_r = N_r - rank(d_r) - rank(d_{r+1}); the alternating sum is checked
    against the Euler characteristic.
    """
    n = complex_.dimension
    ranks = _ranks_cached(complex_)
    betti = []
    for r in range(n + 1):
        low = ranks[r - 1] if r >= 1 else 0
        high = ranks[r] if r < n else 0
        betti.append(complex_.num(r) - low - high)
    chi = euler_characteristic(complex_)
    alt = sum((-1) ** r * b for r, b in enumerate(betti))
    if alt != chi:
        raise AssertionError(
            f"homology ranks {betti} violate Euler characteristic {chi}"
        )
    return tuple(betti)
