"""Exact solver for the binary orbit-selection program.

The model is max w.x subject to M x <= r on every row, x binary: columns
are point orbits weighted by their size, rows are line orbits, and the
optimum is the largest arc admitting the prescribed group.

solve() runs a depth-first branch and bound: branch on the heaviest
undecided column (ties to the lowest index), include-branch first; after
every inclusion, propagation zero-fixes any undecided column whose
coefficient exceeds a row's residual capacity, so the pruning bound is
simply current objective + total undecided weight.  The search is exact
when budgets are not exhausted, and fully deterministic.

Models can also be exported in the LP text format understood by standard
ILP solvers, and re-read by parse_lp.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field

import numpy as np

from pgarcs.orbits import OrbitIncidence


class BadRError(ValueError):
    pass


class SolveStatus(enum.Enum):
    OPTIMAL = "optimal"
    FEASIBLE_BUDGET_EXHAUSTED = "feasible_budget_exhausted"
    INFEASIBLE = "infeasible"  # unused: x = 0 is always feasible


@dataclass
class PackingModel:
    """Sparse weighted packing instance with a uniform right-hand side."""

    weights: np.ndarray
    row_ptr: np.ndarray
    row_cols: np.ndarray
    row_coefs: np.ndarray
    rhs: int
    q: int = 0
    group_order: int = 1
    row_sizes: np.ndarray | None = None  # row multiplicities, bounding only

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.int64)
        if len(self.weights) == 0:
            raise ValueError("model needs at least one column")
        if np.any(self.weights < 1):
            raise ValueError("weights must be >= 1")
        if self.rhs < 1:
            raise BadRError(f"right-hand side must be >= 1, got {self.rhs}")
        if np.any(self.row_coefs < 0):
            raise ValueError("matrix coefficients must be >= 0")
        if np.any(np.diff(self.row_ptr) < 1):
            raise ValueError("every row needs at least one nonzero")
        if self.row_sizes is None:
            self.row_sizes = np.ones(self.num_rows, dtype=np.int64)
        else:
            self.row_sizes = np.asarray(self.row_sizes, dtype=np.int64)
        self._build_columns()

    def _build_columns(self):
        t = self.num_cols
        counts = np.bincount(self.row_cols, minlength=t)
        self.col_ptr = np.zeros(t + 1, dtype=np.int64)
        np.cumsum(counts, out=self.col_ptr[1:])
        self.col_rows = np.empty(len(self.row_cols), dtype=np.int64)
        self.col_coefs = np.empty(len(self.row_cols), dtype=np.int64)
        fill = self.col_ptr[:-1].copy()
        for i in range(self.num_rows):
            for k in range(self.row_ptr[i], self.row_ptr[i + 1]):
                j = self.row_cols[k]
                pos = fill[j]
                self.col_rows[pos] = i
                self.col_coefs[pos] = self.row_coefs[k]
                fill[j] += 1

    @property
    def num_cols(self) -> int:
        return len(self.weights)

    @property
    def num_rows(self) -> int:
        return len(self.row_ptr) - 1

    @property
    def forced_zero(self) -> np.ndarray:
        """Columns infeasible on their own: some coefficient exceeds rhs."""
        mask = np.zeros(self.num_cols, dtype=bool)
        over = self.row_coefs > self.rhs
        if np.any(over):
            mask[np.unique(self.row_cols[over])] = True
        return mask

    @classmethod
    def from_rows(cls, weights, rows, rhs, q=0, group_order=1) -> "PackingModel":
        """Build from a list of rows, each a list of (col, coef) pairs."""
        ptr = [0]
        cols: list[int] = []
        coefs: list[int] = []
        for row in rows:
            for j, c in row:
                if c != 0:
                    cols.append(j)
                    coefs.append(c)
            ptr.append(len(cols))
        return cls(
            weights=np.asarray(weights, dtype=np.int64),
            row_ptr=np.asarray(ptr, dtype=np.int64),
            row_cols=np.asarray(cols, dtype=np.int64),
            row_coefs=np.asarray(coefs, dtype=np.int64),
            rhs=int(rhs),
            q=q,
            group_order=group_order,
        )

    @classmethod
    def from_dense(cls, weights, matrix, rhs, q=0, group_order=1) -> "PackingModel":
        rows = [
            [(j, int(c)) for j, c in enumerate(row) if c != 0] for row in matrix
        ]
        return cls.from_rows(weights, rows, rhs, q=q, group_order=group_order)

    def row_dot(self, selection: np.ndarray) -> np.ndarray:
        """M x for a 0/1 selection vector."""
        sel = np.asarray(selection, dtype=np.int64)
        out = np.empty(self.num_rows, dtype=np.int64)
        for i in range(self.num_rows):
            lo, hi = self.row_ptr[i], self.row_ptr[i + 1]
            out[i] = np.dot(self.row_coefs[lo:hi], sel[self.row_cols[lo:hi]])
        return out

    def is_feasible(self, selection: np.ndarray) -> bool:
        return bool(np.all(self.row_dot(selection) <= self.rhs))


def model_from_incidence(inc: OrbitIncidence, r: int) -> PackingModel:
    """Packing model for one orbit system and line cap r (1 <= r <= q+1)."""
    q = inc.system.plane.order
    if not 1 <= r <= q + 1:
        raise BadRError(f"r must satisfy 1 <= r <= q+1 = {q + 1}, got {r}")
    rows = [
        [(j, int(c)) for j, c in enumerate(inc.matrix[i]) if c != 0]
        for i in range(inc.matrix.shape[0])
    ]
    model = PackingModel.from_rows(
        inc.weights, rows, r, q=q, group_order=inc.system.group_order
    )
    model.row_sizes = inc.line_orbit_sizes.astype(np.int64)
    return model


@dataclass
class SolverConfig:
    """Budgets and reproducibility knobs for solve().

    initial_incumbent is a known-achievable objective lower bound used as a
    pruning floor; if it overstates the true optimum the returned witness
    will be the warm-start selection with a smaller objective.
    """

    time_budget: float | None = None
    node_budget: int | None = None
    initial_incumbent: int | None = None
    deterministic: bool = True

    def __post_init__(self):
        if self.time_budget is not None and self.time_budget <= 0:
            raise ValueError("time_budget must be positive")
        if self.node_budget is not None and self.node_budget <= 0:
            raise ValueError("node_budget must be positive")


@dataclass
class Solution:
    selection: np.ndarray
    objective: int
    status: SolveStatus
    nodes_explored: int
    elapsed: float


# ---------------------------------------------------------------------------
# search kernel
#
# Iterative DFS over an explicit frame stack so the search can pause at any
# chunk boundary and resume with identical behaviour.  Per depth: f_stage 0
# means the frame is fresh (pick a branch column, try include), 1 means the
# include subtree is finished (undo, try exclude), 2 means both subtrees are
# finished (undo, pop).  Assignments are undone via a trail of column ids;
# entries with state 1 also restore row capacities.
#
# Two admissible pruning bounds are combined: the undecided-weight sum
# (propagation keeps every undecided column individually feasible, so it
# equals the sum of individually feasible weights), and a counting bound:
# any further selection of mass M consumes M units of weighted capacity,
# of which at most cap = sum_i size_i * min(residual_i, undecided_mass_i)
# remain, so the extra objective is at most wstar * cap // mstar where
# wstar/mstar is the best weight-per-mass ratio of any selectable column.
#
# scal slots: 0 objective, 1 undecided weight, 2 best, 3 nodes, 4 depth,
# 5 trail length, 6 exhausted flag, 7 weighted capacity.
# ---------------------------------------------------------------------------


def _search_kernel(
    t,
    w,
    order,
    row_ptr,
    row_cols,
    row_coefs,
    col_ptr,
    col_rows,
    col_coefs,
    row_size,
    und_mass,
    state,
    residual,
    trail,
    f_col,
    f_stage,
    f_pos,
    f_trail,
    best_sel,
    scal,
    wstar,
    mstar,
    node_limit,
    chunk,
):
    obj = scal[0]
    und = scal[1]
    best = scal[2]
    nodes = scal[3]
    depth = scal[4]
    tl = scal[5]
    cap = scal[7]
    limit = nodes + chunk
    if 0 <= node_limit < limit:
        limit = node_limit
    while True:
        if depth < 0:
            scal[6] = 1
            break
        stg = f_stage[depth]
        if stg == 0:
            if nodes >= limit:
                break
            nodes += 1
            pos = f_pos[depth]
            while pos < t and state[order[pos]] != -1:
                pos += 1
            if pos == t:
                if obj > best:
                    best = obj
                    for j in range(t):
                        best_sel[j] = 1 if state[j] == 1 else 0
                depth -= 1
                continue
            j = order[pos]
            f_col[depth] = j
            f_pos[depth] = pos
            f_trail[depth] = tl
            state[j] = 1
            trail[tl] = j
            tl += 1
            obj += w[j]
            und -= w[j]
            for k in range(col_ptr[j], col_ptr[j + 1]):
                i = col_rows[k]
                c = col_coefs[k]
                old = residual[i] if residual[i] < und_mass[i] else und_mass[i]
                residual[i] -= c
                und_mass[i] -= c
                new = residual[i] if residual[i] < und_mass[i] else und_mass[i]
                cap += row_size[i] * (new - old)
            for k in range(col_ptr[j], col_ptr[j + 1]):
                i = col_rows[k]
                ri = residual[i]
                for m in range(row_ptr[i], row_ptr[i + 1]):
                    c2 = row_cols[m]
                    if state[c2] == -1 and row_coefs[m] > ri:
                        state[c2] = 0
                        trail[tl] = c2
                        tl += 1
                        und -= w[c2]
                        for k2 in range(col_ptr[c2], col_ptr[c2 + 1]):
                            i2 = col_rows[k2]
                            old = (
                                residual[i2]
                                if residual[i2] < und_mass[i2]
                                else und_mass[i2]
                            )
                            und_mass[i2] -= col_coefs[k2]
                            new = (
                                residual[i2]
                                if residual[i2] < und_mass[i2]
                                else und_mass[i2]
                            )
                            cap += row_size[i2] * (new - old)
            f_stage[depth] = 1
            bound = obj + und
            if mstar > 0:
                cb = obj + (wstar * cap) // mstar
                if cb < bound:
                    bound = cb
            if bound > best:
                depth += 1
                f_stage[depth] = 0
                f_pos[depth] = pos + 1
        elif stg == 1:
            mark = f_trail[depth]
            while tl > mark:
                tl -= 1
                c = trail[tl]
                if state[c] == 1:
                    obj -= w[c]
                    for k in range(col_ptr[c], col_ptr[c + 1]):
                        i = col_rows[k]
                        old = residual[i] if residual[i] < und_mass[i] else und_mass[i]
                        residual[i] += col_coefs[k]
                        und_mass[i] += col_coefs[k]
                        new = residual[i] if residual[i] < und_mass[i] else und_mass[i]
                        cap += row_size[i] * (new - old)
                else:
                    for k in range(col_ptr[c], col_ptr[c + 1]):
                        i = col_rows[k]
                        old = residual[i] if residual[i] < und_mass[i] else und_mass[i]
                        und_mass[i] += col_coefs[k]
                        new = residual[i] if residual[i] < und_mass[i] else und_mass[i]
                        cap += row_size[i] * (new - old)
                state[c] = -1
                und += w[c]
            jb = f_col[depth]
            state[jb] = 0
            trail[tl] = jb
            tl += 1
            und -= w[jb]
            for k in range(col_ptr[jb], col_ptr[jb + 1]):
                i = col_rows[k]
                old = residual[i] if residual[i] < und_mass[i] else und_mass[i]
                und_mass[i] -= col_coefs[k]
                new = residual[i] if residual[i] < und_mass[i] else und_mass[i]
                cap += row_size[i] * (new - old)
            f_stage[depth] = 2
            bound = obj + und
            if mstar > 0:
                cb = obj + (wstar * cap) // mstar
                if cb < bound:
                    bound = cb
            if bound > best:
                child_pos = f_pos[depth] + 1
                depth += 1
                f_stage[depth] = 0
                f_pos[depth] = child_pos
        else:
            mark = f_trail[depth]
            while tl > mark:
                tl -= 1
                c = trail[tl]
                if state[c] == 1:
                    obj -= w[c]
                    for k in range(col_ptr[c], col_ptr[c + 1]):
                        i = col_rows[k]
                        old = residual[i] if residual[i] < und_mass[i] else und_mass[i]
                        residual[i] += col_coefs[k]
                        und_mass[i] += col_coefs[k]
                        new = residual[i] if residual[i] < und_mass[i] else und_mass[i]
                        cap += row_size[i] * (new - old)
                else:
                    for k in range(col_ptr[c], col_ptr[c + 1]):
                        i = col_rows[k]
                        old = residual[i] if residual[i] < und_mass[i] else und_mass[i]
                        und_mass[i] += col_coefs[k]
                        new = residual[i] if residual[i] < und_mass[i] else und_mass[i]
                        cap += row_size[i] * (new - old)
                state[c] = -1
                und += w[c]
            depth -= 1
    scal[0] = obj
    scal[1] = und
    scal[2] = best
    scal[3] = nodes
    scal[4] = depth
    scal[5] = tl
    scal[7] = cap


try:  # compiled kernel when numba is present; the plain function otherwise
    from numba import njit as _njit

    _kernel = _njit(cache=True, nogil=True)(_search_kernel)
    HAVE_COMPILED_KERNEL = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _kernel = _search_kernel
    HAVE_COMPILED_KERNEL = False

_CHUNK = 1 << 21 if HAVE_COMPILED_KERNEL else 1 << 15


def greedy_warm_start(model: PackingModel) -> Solution:
    """Feasible incumbent: one pass over columns by weight per tightness.

    Tightness of a column is its total coefficient mass; columns are taken
    in descending weight/tightness order (ties to the lower index) whenever
    they still fit every row.
    """
    t = model.num_cols
    mass = np.zeros(t, dtype=np.int64)
    np.add.at(mass, model.row_cols, model.row_coefs)
    score = model.weights / np.maximum(mass, 1)
    score[mass == 0] = np.inf  # columns on no row are free
    order = np.lexsort((np.arange(t), -score))
    residual = np.full(model.num_rows, model.rhs, dtype=np.int64)
    sel = np.zeros(t, dtype=np.int8)
    for j in order:
        lo, hi = model.col_ptr[j], model.col_ptr[j + 1]
        rows = model.col_rows[lo:hi]
        coefs = model.col_coefs[lo:hi]
        if np.all(coefs <= residual[rows]):
            residual[rows] -= coefs
            sel[j] = 1
    objective = int(np.dot(model.weights, sel))
    return Solution(
        selection=sel,
        objective=objective,
        status=SolveStatus.FEASIBLE_BUDGET_EXHAUSTED,
        nodes_explored=0,
        elapsed=0.0,
    )


def solve(model: PackingModel, config: SolverConfig | None = None) -> Solution:
    """Exact maximum of the packing model, within the configured budgets."""
    cfg = config or SolverConfig()
    start = time.monotonic()
    deadline = None if cfg.time_budget is None else start + cfg.time_budget
    t = model.num_cols

    warm = greedy_warm_start(model)
    best_sel = warm.selection.copy()
    floor = warm.objective
    if cfg.initial_incumbent is not None:
        floor = max(floor, cfg.initial_incumbent)

    state = np.full(t, -1, dtype=np.int8)
    state[model.forced_zero] = 0
    selectable = state == -1
    und = int(model.weights[selectable].sum())
    residual = np.full(model.num_rows, model.rhs, dtype=np.int64)
    trail = np.zeros(max(t, 1), dtype=np.int64)
    f_col = np.zeros(t + 2, dtype=np.int64)
    f_stage = np.zeros(t + 2, dtype=np.int8)
    f_pos = np.zeros(t + 2, dtype=np.int64)
    f_trail = np.zeros(t + 2, dtype=np.int64)
    order = np.lexsort((np.arange(t), -model.weights)).astype(np.int64)

    # counting-bound state: per-row undecided mass, column mass/weight ratio
    sizes = model.row_sizes
    entry_rows = np.repeat(np.arange(model.num_rows), np.diff(model.row_ptr))
    und_mass = np.zeros(model.num_rows, dtype=np.int64)
    keep = selectable[model.row_cols]
    np.add.at(und_mass, entry_rows[keep], model.row_coefs[keep])
    cap = int(np.dot(sizes, np.minimum(residual, und_mass)))
    col_mass = np.zeros(t, dtype=np.int64)
    np.add.at(col_mass, model.row_cols, model.row_coefs * sizes[entry_rows])
    wstar = mstar = 0
    for j in np.flatnonzero(selectable):
        wj, mj = int(model.weights[j]), int(col_mass[j])
        if mj == 0:  # free column: the counting bound cannot apply
            wstar, mstar = 0, 0
            break
        if mstar == 0 or wj * mstar > wstar * mj:
            wstar, mstar = wj, mj

    scal = np.zeros(8, dtype=np.int64)
    scal[1] = und
    scal[2] = floor
    scal[7] = cap
    node_limit = np.int64(-1 if cfg.node_budget is None else cfg.node_budget)

    exhausted = False
    while True:
        _kernel(
            t,
            model.weights,
            order,
            model.row_ptr,
            model.row_cols,
            model.row_coefs,
            model.col_ptr,
            model.col_rows,
            model.col_coefs,
            sizes,
            und_mass,
            state,
            residual,
            trail,
            f_col,
            f_stage,
            f_pos,
            f_trail,
            best_sel,
            scal,
            np.int64(wstar),
            np.int64(mstar),
            node_limit,
            np.int64(_CHUNK),
        )
        if scal[6]:
            exhausted = True
            break
        if node_limit >= 0 and scal[3] >= node_limit:
            break
        if deadline is not None and time.monotonic() >= deadline:
            break

    objective = int(np.dot(model.weights, best_sel))
    if not model.is_feasible(best_sel):
        raise RuntimeError("solver produced an infeasible selection")
    status = SolveStatus.OPTIMAL if exhausted else SolveStatus.FEASIBLE_BUDGET_EXHAUSTED
    return Solution(
        selection=best_sel,
        objective=objective,
        status=status,
        nodes_explored=int(scal[3]),
        elapsed=time.monotonic() - start,
    )


# ---------------------------------------------------------------------------
# text formats
# ---------------------------------------------------------------------------


def _wrap(tokens, head=""):
    lines = []
    cur = head
    for tok in tokens:
        if cur and len(cur) + 1 + len(tok) > 72:
            lines.append(cur)
            cur = " " + tok
        else:
            cur = f"{cur} {tok}"
    if cur:
        lines.append(cur)
    return lines


def format_lp(model: PackingModel) -> str:
    """LP-format text: Maximize / Subject To / Binaries / End."""
    out = ["Maximize"]
    terms = []
    for j, wj in enumerate(model.weights):
        term = f"x{j}" if wj == 1 else f"{wj} x{j}"
        terms.append(("+ " if j else "") + term)
    out.extend(_wrap(terms, " obj:"))
    out.append("Subject To")
    for i in range(model.num_rows):
        lo, hi = model.row_ptr[i], model.row_ptr[i + 1]
        terms = []
        for pos, k in enumerate(range(lo, hi)):
            j, c = model.row_cols[k], model.row_coefs[k]
            term = f"x{j}" if c == 1 else f"{c} x{j}"
            terms.append(("+ " if pos else "") + term)
        terms.append(f"<= {model.rhs}")
        out.extend(_wrap(terms, f" c{i}:"))
    out.append("Binaries")
    out.extend(_wrap([f"x{j}" for j in range(model.num_cols)]))
    out.append("End")
    return "\n".join(out) + "\n"


def export_lp(model: PackingModel, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_lp(model))


def parse_lp(path) -> PackingModel:
    """Re-read an LP file produced by export_lp into a model."""
    import re

    with open(path, encoding="ascii") as fh:
        text = fh.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    section = None
    obj_text = ""
    con_texts: list[str] = []
    bin_text = ""
    for ln in lines:
        word = ln.strip().lower()
        if word in ("maximize", "subject to", "binaries", "end"):
            section = word
            continue
        if section == "maximize":
            obj_text += " " + ln.strip()
        elif section == "subject to":
            if re.match(r"\s*c\d+:", ln):
                con_texts.append(ln.strip())
            else:
                con_texts[-1] += " " + ln.strip()
        elif section == "binaries":
            bin_text += " " + ln.strip()

    nvars = len(re.findall(r"x(\d+)", bin_text))
    weights = np.zeros(nvars, dtype=np.int64)
    body = obj_text.split(":", 1)[1]
    for coef, var in re.findall(r"(\d*)\s*x(\d+)", body):
        weights[int(var)] = int(coef) if coef else 1
    rows = []
    rhs = None
    for ct in con_texts:
        body, _, tail = ct.split(":", 1)[1].partition("<=")
        rhs = int(tail)
        row = [
            (int(var), int(coef) if coef else 1)
            for coef, var in re.findall(r"(\d*)\s*x(\d+)", body)
        ]
        rows.append(row)
    return PackingModel.from_rows(weights, rows, rhs)


def format_model_dump(model: PackingModel) -> str:
    """Sparse dump: header "q r group_order t s", weights, then rows."""
    out = [
        f"{model.q} {model.rhs} {model.group_order} {model.num_cols} {model.num_rows}"
    ]
    out.append(" ".join(str(w) for w in model.weights))
    for i in range(model.num_rows):
        lo, hi = model.row_ptr[i], model.row_ptr[i + 1]
        cells = " ".join(
            f"{model.row_cols[k]}:{model.row_coefs[k]}" for k in range(lo, hi)
        )
        out.append(f"{i}: {cells}")
    return "\n".join(out) + "\n"


def dump_model(model: PackingModel, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_model_dump(model))
