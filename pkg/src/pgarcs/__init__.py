"""Toolkit for (n,r)-arcs in PG(2,q).

Builds arcs by prescribing a cyclic subgroup of GL(3,q), condensing the
line/point incidence relation to orbit level, and solving the resulting
binary packing program exactly.  Ships the published reference arcs and a
batch verifier for them.
"""

from pgarcs.gf import GF, parse_field
from pgarcs.plane import Plane, enumerate_plane
from pgarcs.orbits import GenMatrix, compute_orbits, build_incidence
from pgarcs.ilp import PackingModel, SolverConfig, Solution, SolveStatus, solve
from pgarcs.arcs import ArcRecord, verify_arc, spectrum, griesmer_sum

__version__ = "0.1.0"

__all__ = [
    "GF",
    "parse_field",
    "Plane",
    "enumerate_plane",
    "GenMatrix",
    "compute_orbits",
    "build_incidence",
    "PackingModel",
    "SolverConfig",
    "Solution",
    "SolveStatus",
    "solve",
    "ArcRecord",
    "verify_arc",
    "spectrum",
    "griesmer_sum",
    "__version__",
]
