"""Cyclic matrix groups acting on PG(2,q): orbits, incidence condensation.

A generator A in GL(3,q) acts on points by p -> normalize(A.p) with p as a
column vector; this is the convention under which every bundled reference
arc is closed (the mirrored row-vector action fails for them).  Lines map
by their normals through the inverse transpose, which preserves incidence
and needs a single matrix inversion per generator.

Scalar matrices act trivially, so the group order used here is projective:
the least k >= 1 with A^k scalar, equivalently the order of the induced
point permutation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from pgarcs.gf import GF
from pgarcs.plane import Plane, Triple, normalize, normalize_rows


class SingularMatrixError(ValueError):
    pass


@dataclass(frozen=True)
class GenMatrix:
    """3x3 matrix over GF(q), entries row-major (a11,a12,...,a33)."""

    gf: GF
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != 9:
            raise ValueError(f"need 9 entries, got {len(self.entries)}")
        for a in self.entries:
            self.gf.check(a)

    @classmethod
    def identity(cls, gf: GF) -> "GenMatrix":
        return cls(gf, (1, 0, 0, 0, 1, 0, 0, 0, 1))

    @classmethod
    def from_text(cls, gf: GF, text: str) -> "GenMatrix":
        if text.strip() == "identity":
            return cls.identity(gf)
        return cls(gf, tuple(int(x) for x in text.split(",")))

    def to_text(self) -> str:
        return ",".join(str(a) for a in self.entries)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[3 * i + j]

    def det(self) -> int:
        g = self.gf
        m = self
        pos = g.mul(m[0, 0], g.sub(g.mul(m[1, 1], m[2, 2]), g.mul(m[1, 2], m[2, 1])))
        mid = g.mul(m[0, 1], g.sub(g.mul(m[1, 0], m[2, 2]), g.mul(m[1, 2], m[2, 0])))
        neg = g.mul(m[0, 2], g.sub(g.mul(m[1, 0], m[2, 1]), g.mul(m[1, 1], m[2, 0])))
        return g.add(g.sub(pos, mid), neg)

    def is_invertible(self) -> bool:
        return self.det() != 0

    def transpose(self) -> "GenMatrix":
        e = self.entries
        return GenMatrix(self.gf, (e[0], e[3], e[6], e[1], e[4], e[7], e[2], e[5], e[8]))

    def inverse(self) -> "GenMatrix":
        d = self.det()
        if d == 0:
            raise SingularMatrixError(f"matrix {self.entries} is singular")
        g = self.gf
        di = g.inv(d)
        m = self

        def cof(i1, j1, i2, j2):
            return g.sub(g.mul(m[i1, j1], m[i2, j2]), g.mul(m[i1, j2], m[i2, j1]))

        # adjugate entries (transposed cofactors), scaled by 1/det
        adj = (
            cof(1, 1, 2, 2), g.neg(cof(0, 1, 2, 2)), cof(0, 1, 1, 2),
            g.neg(cof(1, 0, 2, 2)), cof(0, 0, 2, 2), g.neg(cof(0, 0, 1, 2)),
            cof(1, 0, 2, 1), g.neg(cof(0, 0, 2, 1)), cof(0, 0, 1, 1),
        )
        return GenMatrix(g, tuple(g.mul(a, di) for a in adj))

    def matmul(self, other: "GenMatrix") -> "GenMatrix":
        g = self.gf
        out = []
        for i in range(3):
            for j in range(3):
                acc = 0
                for k in range(3):
                    acc = g.add(acc, g.mul(self[i, k], other[k, j]))
                out.append(acc)
        return GenMatrix(g, tuple(out))

    def is_scalar(self) -> bool:
        e = self.entries
        return (
            e[1] == e[2] == e[3] == e[5] == e[6] == e[7] == 0
            and e[0] == e[4] == e[8] != 0
        )

    def apply(self, v) -> Triple:
        """A.v for a column triple v, without normalization."""
        g = self.gf
        return tuple(
            g.add(g.add(g.mul(self[i, 0], v[0]), g.mul(self[i, 1], v[1])),
                  g.mul(self[i, 2], v[2]))
            for i in range(3)
        )


def act_point(m: GenMatrix, p) -> Triple:
    """Image of a point: normalize(A.p)."""
    return normalize(m.gf, m.apply(p))


def act_line(m: GenMatrix, l) -> Triple:
    """Image of a line normal: normalize((A^-1)^T.l); preserves incidence."""
    return normalize(m.gf, m.inverse().transpose().apply(l))


def _matrix_permutation(plane: Plane, m: GenMatrix) -> np.ndarray:
    """Permutation of plane indices induced by v -> normalize(M.v)."""
    gf = plane.gf
    mul, add = gf.mul_table, gf.add_table
    c = plane.coords
    cols = []
    for i in range(3):
        y = mul[m[i, 0]][c[:, 0]]
        y = add[y, mul[m[i, 1]][c[:, 1]]]
        y = add[y, mul[m[i, 2]][c[:, 2]]]
        cols.append(y)
    images = normalize_rows(gf, np.stack(cols, axis=1))
    return plane.ids_of(images)


def point_permutation(plane: Plane, m: GenMatrix) -> np.ndarray:
    if not m.is_invertible():
        raise SingularMatrixError(f"matrix {m.entries} is singular")
    return _matrix_permutation(plane, m)


def line_permutation(plane: Plane, m: GenMatrix) -> np.ndarray:
    return _matrix_permutation(plane, m.inverse().transpose())


@dataclass
class OrbitSystem:
    """Orbit partitions of points and lines under one cyclic group <A>."""

    plane: Plane
    generator: GenMatrix
    group_order: int
    point_orbits: list[np.ndarray]
    line_orbits: list[np.ndarray]
    orbit_of_point: np.ndarray
    orbit_of_line: np.ndarray
    point_perm: np.ndarray
    line_perm: np.ndarray

    @property
    def num_point_orbits(self) -> int:
        return len(self.point_orbits)

    @property
    def num_line_orbits(self) -> int:
        return len(self.line_orbits)


def _cycles(perm: np.ndarray) -> tuple[list[np.ndarray], np.ndarray]:
    # orbits of a cyclic group are exactly the cycles of its generator;
    # scanning ascending puts each orbit's minimal index first
    n = len(perm)
    orbit_of = np.full(n, -1, dtype=np.int32)
    orbits: list[np.ndarray] = []
    for start in range(n):
        if orbit_of[start] >= 0:
            continue
        k = len(orbits)
        cyc = []
        j = start
        while orbit_of[j] < 0:
            orbit_of[j] = k
            cyc.append(j)
            j = int(perm[j])
        orbits.append(np.array(cyc, dtype=np.int32))
    return orbits, orbit_of


def compute_orbits(plane: Plane, m: GenMatrix) -> OrbitSystem:
    """Orbit partitions induced by iterating the generator's action."""
    if not m.is_invertible():
        raise SingularMatrixError(f"matrix {m.entries} is singular")
    pperm = _matrix_permutation(plane, m)
    lperm = _matrix_permutation(plane, m.inverse().transpose())
    porbits, p_of = _cycles(pperm)
    lorbits, l_of = _cycles(lperm)
    order = math.lcm(*(len(o) for o in porbits))
    return OrbitSystem(
        plane=plane,
        generator=m,
        group_order=order,
        point_orbits=porbits,
        line_orbits=lorbits,
        orbit_of_point=p_of,
        orbit_of_line=l_of,
        point_perm=pperm,
        line_perm=lperm,
    )


@dataclass
class OrbitIncidence:
    """Condensed incidence: rows = line orbits, columns = point orbits.

    matrix[i, j] counts the points of column orbit j on one fixed line of
    row orbit i; weights[j] is the size of point orbit j.
    """

    system: OrbitSystem
    matrix: np.ndarray
    weights: np.ndarray
    row_reps: np.ndarray
    line_orbit_sizes: np.ndarray


def build_incidence(sys: OrbitSystem) -> OrbitIncidence:
    plane = sys.plane
    q = plane.order
    t = sys.num_point_orbits
    s = sys.num_line_orbits
    weights = np.array([len(o) for o in sys.point_orbits], dtype=np.int64)
    matrix = np.zeros((s, t), dtype=np.int64)
    reps = np.empty(s, dtype=np.int32)
    sizes = np.empty(s, dtype=np.int64)
    for i, orb in enumerate(sys.line_orbits):
        rep = int(orb[0])
        reps[i] = rep
        sizes[i] = len(orb)
        row = np.bincount(
            sys.orbit_of_point[plane.points_on_line[rep]], minlength=t
        )
        if len(orb) > 1:
            # entries must not depend on the chosen representative
            alt = np.bincount(
                sys.orbit_of_point[plane.points_on_line[int(orb[1])]], minlength=t
            )
            if not np.array_equal(row, alt):
                raise RuntimeError("orbit incidence depends on representative")
        matrix[i] = row
    if not np.all(matrix.sum(axis=1) == q + 1):
        raise RuntimeError("orbit incidence row sums differ from q+1")
    return OrbitIncidence(
        system=sys,
        matrix=matrix,
        weights=weights,
        row_reps=reps,
        line_orbit_sizes=sizes,
    )
