"""Arc verification, line spectra, code parameters, blocking complements.

An (n,r)-arc is a set of n points meeting every line in at most r points,
with some line meeting it in exactly r.  Claims are never trusted: the
achieved r is always recomputed from the full line spectrum.  Writing the
points as generator-matrix columns yields a projective [n,3,n-r]_q code,
and the complement of the arc is a (q^2+q+1-n, q+1-r)-blocking set.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from pgarcs.gf import GF, parse_field
from pgarcs.orbits import OrbitSystem
from pgarcs.plane import Plane, Triple


class ArcError(ValueError):
    pass


class UnknownPointError(ArcError):
    pass


class RankDeficientError(ArcError):
    pass


class EmptySelectionError(ArcError):
    pass


class LengthMismatchError(ArcError):
    pass


class ArcParseError(ArcError):
    pass


class CountMismatchError(ArcParseError):
    pass


class NonNormalizedPointError(ArcParseError):
    pass


@dataclass
class ArcRecord:
    """A concrete point set with an optional claimed r and group generator."""

    gf: GF
    claimed_r: int | None
    points: tuple[Triple, ...]
    provenance: str = ""
    generator: tuple[int, ...] | None = None

    def __post_init__(self):
        if len(self.points) == 0:
            raise ArcError("an arc needs at least one point")
        seen = set()
        for pt in self.points:
            for x in pt:
                self.gf.check(x)
            lead = pt[0] if pt[0] else (pt[1] if pt[1] else pt[2])
            if lead != 1:
                raise NonNormalizedPointError(f"point {pt} is not normalized")
            if pt in seen:
                raise ArcError(f"duplicate point {pt}")
            seen.add(pt)

    @property
    def n(self) -> int:
        return len(self.points)


@dataclass
class LineSpectrum:
    """How many lines meet the arc in exactly i points, for each i."""

    counts: dict[int, int]
    max_intersection: int


@dataclass
class VerifyResult:
    n: int
    achieved_r: int
    is_valid_for_claim: bool | None
    spectrum: LineSpectrum


@dataclass
class CodeParams:
    n: int
    k: int
    d: int
    q: int


def point_ids(plane: Plane, arc: ArcRecord) -> np.ndarray:
    ids = []
    for pt in arc.points:
        idx = plane.point_index.get(pt)
        if idx is None:
            raise UnknownPointError(f"point {pt} not in PG(2,{plane.order})")
        ids.append(idx)
    return np.array(ids, dtype=np.int64)


def _per_line_counts(plane: Plane, arc: ArcRecord) -> np.ndarray:
    member = np.zeros(plane.n_points, dtype=np.int16)
    member[point_ids(plane, arc)] = 1
    return member[plane.points_on_line].sum(axis=1)


def spectrum(plane: Plane, arc: ArcRecord) -> LineSpectrum:
    """Exact intersection counts over all q^2+q+1 lines."""
    per_line = _per_line_counts(plane, arc)
    hist = np.bincount(per_line)
    counts = {i: int(c) for i, c in enumerate(hist) if c}
    return LineSpectrum(counts=counts, max_intersection=int(per_line.max()))


def verify_arc(plane: Plane, arc: ArcRecord) -> VerifyResult:
    """Recompute n and the achieved r; claims are validated, never assumed."""
    spec = spectrum(plane, arc)
    achieved = spec.max_intersection
    valid = None if arc.claimed_r is None else achieved == arc.claimed_r
    return VerifyResult(
        n=arc.n, achieved_r=achieved, is_valid_for_claim=valid, spectrum=spec
    )


def griesmer_sum(k: int, d: int, q: int) -> int:
    """sum_{i<k} ceil(d / q^i), the least length of any [n,k,d]_q code."""
    if k < 1 or d < 1 or q < 2:
        raise ValueError(f"bad Griesmer parameters k={k} d={d} q={q}")
    total = 0
    power = 1
    for _ in range(k):
        total += -(-d // power)
        power *= q
    return total


def meets_griesmer(n: int, achieved_r: int, q: int) -> bool:
    """True iff the associated [n,3,n-r]_q code meets the Griesmer bound."""
    return n == griesmer_sum(3, n - achieved_r, q)


def blocking_complement(plane: Plane, arc: ArcRecord) -> tuple[int, int]:
    """Size and strength (b, t) of the complementary blocking set.

    The complement of a verified (n,r)-arc meets every line in at least
    q+1-r points; this is checked exhaustively before returning.
    """
    q = plane.order
    per_line = _per_line_counts(plane, arc)
    achieved = int(per_line.max())
    size = plane.n_points - arc.n
    t = q + 1 - achieved
    if int((q + 1 - per_line).min()) < t:
        raise ArcError("complement misses a line: arc verification is wrong")
    return size, t


def code_generator_columns(
    plane: Plane, arc: ArcRecord
) -> tuple[CodeParams, np.ndarray]:
    """Generator matrix (points as columns) and its [n,3,n-r]_q parameters."""
    gf = plane.gf
    if arc.n < 3:
        raise RankDeficientError("need at least 3 points to span GF(q)^3")
    cols = np.array(arc.points, dtype=np.int16).T
    if _rank3(gf, arc.points) < 3:
        raise RankDeficientError("arc points span a proper subspace")
    achieved = spectrum(plane, arc).max_intersection
    return CodeParams(n=arc.n, k=3, d=arc.n - achieved, q=gf.q), cols


def _rank3(gf: GF, points) -> int:
    # Gaussian elimination over GF(q), points as rows; rank caps at 3
    rows = [list(p) for p in points]
    rank = 0
    for col in range(3):
        piv = None
        for r in range(rank, len(rows)):
            if rows[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = gf.inv(rows[rank][col])
        rows[rank] = [gf.mul(x, inv) for x in rows[rank]]
        for r in range(rank + 1, len(rows)):
            if rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [
                    gf.sub(x, gf.mul(f, y)) for x, y in zip(rows[r], rows[rank])
                ]
        rank += 1
        if rank == 3:
            break
    return rank


def min_distance(gf: GF, cols: np.ndarray) -> int:
    """Minimum weight over all q^3-1 nonzero codewords (exhaustive).

    Cost grows as q^3 * n; meant for small fields (q <= 9).
    """
    q = gf.q
    mul, add = gf.mul_table, gf.add_table
    msgs = np.indices((q, q, q)).reshape(3, -1).T.astype(np.int16)
    cw = mul[msgs[:, 0][:, None], cols[0][None, :]]
    cw = add[cw, mul[msgs[:, 1][:, None], cols[1][None, :]]]
    cw = add[cw, mul[msgs[:, 2][:, None], cols[2][None, :]]]
    weights = (cw != 0).sum(axis=1)
    nonzero = ~np.all(msgs == 0, axis=1)
    return int(weights[nonzero].min())


def is_orbit_union(sys: OrbitSystem, arc: ArcRecord) -> bool:
    """True iff the generator maps every arc point back into the arc."""
    ids = point_ids(sys.plane, arc)
    member = np.zeros(sys.plane.n_points, dtype=bool)
    member[ids] = True
    return bool(np.all(member[sys.point_perm[ids]]))


def arc_from_selection(
    sys: OrbitSystem, selection, claimed_r: int | None = None
) -> ArcRecord:
    """Expand a binary orbit-selection vector into an explicit arc."""
    sel = np.asarray(selection)
    if len(sel) != sys.num_point_orbits:
        raise LengthMismatchError(
            f"selection length {len(sel)} != {sys.num_point_orbits} point orbits"
        )
    chosen = np.flatnonzero(sel)
    if len(chosen) == 0:
        raise EmptySelectionError("no orbit selected: the empty arc is invalid")
    ids = np.sort(np.concatenate([sys.point_orbits[j] for j in chosen]))
    points = tuple(sys.plane.points[i] for i in ids)
    return ArcRecord(
        gf=sys.plane.gf,
        claimed_r=claimed_r,
        points=points,
        provenance=f"selection of {len(chosen)} orbits",
        generator=sys.generator.entries,
    )


# ---------------------------------------------------------------------------
# arc file format: header "q=<desc> r=<r> n=<n> gen=<9 codes or '-'>",
# then one "(a,b,c)" point per line; reader is whitespace-insensitive,
# writer emits points in canonical plane order
# ---------------------------------------------------------------------------

_POINT_RE = re.compile(r"\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)")


def parse_arc_text(text: str, provenance: str = "") -> ArcRecord:
    lines = text.strip().splitlines()
    if not lines:
        raise ArcParseError("empty arc text")
    header = lines[0].strip()
    fields = {}
    for token in header.split():
        key, eq, val = token.partition("=")
        if not eq:
            raise ArcParseError(f"bad header token {token!r}")
        fields[key] = val
    try:
        gf = parse_field(fields["q"])
        r = int(fields["r"])
        n = int(fields["n"])
        gen_text = fields.get("gen", "-")
    except (KeyError, ValueError) as exc:
        raise ArcParseError(f"bad arc header {header!r}: {exc}") from exc
    gen = None
    if gen_text != "-":
        gen = tuple(int(x) for x in gen_text.split(","))
        if len(gen) != 9:
            raise ArcParseError(f"generator needs 9 entries: {gen_text!r}")
    body = "\n".join(lines[1:])
    pts = [
        (int(a), int(b), int(c)) for a, b, c in _POINT_RE.findall(body)
    ]
    leftover = _POINT_RE.sub("", body).replace(",", "").strip()
    if leftover:
        raise ArcParseError(f"unparsed arc content: {leftover[:40]!r}")
    if len(pts) != n:
        raise CountMismatchError(f"header says n={n} but {len(pts)} points listed")
    return ArcRecord(
        gf=gf, claimed_r=r, points=tuple(pts), provenance=provenance, generator=gen
    )


def format_arc(arc: ArcRecord) -> str:
    gen = ",".join(str(a) for a in arc.generator) if arc.generator else "-"
    head = f"q={arc.gf.descriptor()} r={arc.claimed_r} n={arc.n} gen={gen}"
    pts = "\n".join(f"({a},{b},{c})" for a, b, c in sorted(arc.points))
    return f"{head}\n{pts}\n"


def read_arc(path) -> ArcRecord:
    with open(path, encoding="ascii") as fh:
        return parse_arc_text(fh.read(), provenance=str(path))


def write_arc(arc: ArcRecord, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_arc(arc))
