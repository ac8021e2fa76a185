"""Points, lines and incidence of the projective plane PG(2,q).

Points are the 1-dimensional subspaces of GF(q)^3, lines the 2-dimensional
ones.  Both are stored as normalized homogeneous triples of element codes:
the leftmost nonzero coordinate equals 1, which makes the representative of
each subspace unique.  A point lies on a line iff the dot product of the
point triple with the line's normal triple vanishes.

The canonical enumeration used everywhere is (0,0,1), then (0,1,*) with *
ascending, then (1,*,*) in lexicographic code order; lines are ordered the
same way by their normals.  Orbit numbering and ILP column order inherit
this, so results are reproducible across runs.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from pgarcs.gf import GF


class ZeroVectorError(ValueError):
    pass


class EqualPointsError(ValueError):
    pass


Triple = tuple[int, int, int]


def normalize(gf: GF, v) -> Triple:
    """Scale a nonzero triple so its leftmost nonzero coordinate is 1."""
    a, b, c = (gf.check(x) for x in v)
    lead = a if a else (b if b else c)
    if lead == 0:
        raise ZeroVectorError("cannot normalize the zero triple")
    if lead == 1:
        return (a, b, c)
    s = gf.inv(lead)
    return (gf.mul(a, s), gf.mul(b, s), gf.mul(c, s))


def incident(gf: GF, point, line) -> bool:
    """True iff the point lies on the line (dot product zero in GF(q))."""
    acc = 0
    for x, y in zip(point, line):
        acc = gf.add(acc, gf.mul(x, y))
    return acc == 0


def line_through(gf: GF, p1, p2) -> Triple:
    """The unique line through two distinct points (normalized cross product)."""
    if tuple(p1) == tuple(p2):
        raise EqualPointsError(f"points coincide: {p1}")
    a1, a2, a3 = p1
    b1, b2, b3 = p2
    n = (
        gf.sub(gf.mul(a2, b3), gf.mul(a3, b2)),
        gf.sub(gf.mul(a3, b1), gf.mul(a1, b3)),
        gf.sub(gf.mul(a1, b2), gf.mul(a2, b1)),
    )
    return normalize(gf, n)


def normalize_rows(gf: GF, rows: np.ndarray) -> np.ndarray:
    """Vectorised `normalize` over an (N,3) array of nonzero triples."""
    a, b, c = rows[:, 0], rows[:, 1], rows[:, 2]
    lead = np.where(a != 0, a, np.where(b != 0, b, c))
    if np.any(lead == 0):
        raise ZeroVectorError("zero triple in batch normalization")
    scale = gf.inv_table[lead]
    return gf.mul_table[rows, scale[:, None]]


class Plane:
    """Full enumeration of PG(2,q) with O(1) incidence lookups.

    Immutable after construction; safe to share between threads.
    """

    def __init__(self, gf: GF):
        q = gf.q
        self.gf = gf
        self.order = q
        pts: list[Triple] = [(0, 0, 1)]
        pts += [(0, 1, a) for a in range(q)]
        pts += [(1, a, b) for a in range(q) for b in range(q)]
        self.points = pts
        self.lines = list(pts)  # identical triples serve as line normals
        self.n_points = len(pts)
        self.point_index = {p: i for i, p in enumerate(pts)}
        self.line_index = self.point_index
        self.coords = np.array(pts, dtype=np.int16)

        # id lookup for normalized triples, keyed by base-q digit encoding
        enc = (self.coords[:, 0].astype(np.int64) * q + self.coords[:, 1]) * q
        enc += self.coords[:, 2]
        lut = np.full(q * q * q, -1, dtype=np.int32)
        lut[enc] = np.arange(self.n_points, dtype=np.int32)
        self._id_lut = lut

        # dot(line_i, point_j) over GF(q) for all pairs; the matrix is
        # symmetric because points and line normals share one triple list
        mul, add = gf.mul_table, gf.add_table
        cl = self.coords
        d = mul[cl[:, 0][:, None], cl[:, 0][None, :]]
        d = add[d, mul[cl[:, 1][:, None], cl[:, 1][None, :]]]
        d = add[d, mul[cl[:, 2][:, None], cl[:, 2][None, :]]]
        on = d == 0
        counts = on.sum(axis=1)
        if not np.all(counts == q + 1):
            raise RuntimeError("incidence construction failed line-size check")
        rows, cols = np.nonzero(on)
        self.points_on_line = cols.reshape(self.n_points, q + 1).astype(np.int32)
        self.lines_on_point = self.points_on_line  # symmetry of the dot product

    def ids_of(self, triples: np.ndarray) -> np.ndarray:
        """Indices of an (N,3) array of normalized triples."""
        q = self.order
        enc = (triples[:, 0].astype(np.int64) * q + triples[:, 1]) * q
        enc += triples[:, 2]
        ids = self._id_lut[enc]
        if np.any(ids < 0):
            raise KeyError("non-normalized or unknown triple in batch lookup")
        return ids

    def __repr__(self):
        return f"Plane(q={self.order}, {self.n_points} points/lines)"


@lru_cache(maxsize=None)
def enumerate_plane(gf: GF) -> Plane:
    """Canonical (cached) plane for a field; ordering is deterministic."""
    return Plane(gf)
