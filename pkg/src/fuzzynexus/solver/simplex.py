"""Bounded-variable primal simplex for linear programs.

The engine works on the equality form  min c.x  s.t.  A x = b,  l <= x <= u
obtained by adding one slack per inequality row and, where the starting
point cannot be made feasible with slacks alone, one artificial column per
row.  Phase 1 minimizes the artificial total; phase 2 minimizes the true
objective with artificials pinned to zero.  Before artificials are created,
a crash step makes singleton structural columns basic, which leaves the
initial basis a signed permutation whose inverse is written down directly.

Nonbasic variables sit at a bound (or at zero when free); an iteration
either flips a nonbasic variable across to its other bound or exchanges it
against a blocking basic variable.  A dense inverse of the basis is kept
up to date with in-place rank-one updates and refactorized from scratch
before any final claim of optimality or infeasibility.  Pricing is
steepest-violation (Dantzig) and switches permanently to Bland's rule after
a configurable number of iterations without objective improvement, which
makes termination safe under degeneracy.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp
from scipy.linalg.blas import dger

from fuzzynexus.solver.problem import (
    LinearProgram,
    Relation,
    SolveStatus,
    Solution,
    SolverConfig,
)

_NB_LOWER, _NB_UPPER, _NB_FREE, _BASIC = 0, 1, 2, 3

_PIVOT_TOL = 1e-10
_RATIO_TIE = 1e-9
_REFACTOR_EVERY = 3000
_RESYNC_EVERY = 64

# below this many matrix entries a dense ndarray beats sparse overheads
_DENSE_CUTOFF = 200_000


class _Numerics(RuntimeError):
    """Internal signal: refactorize and retry the current iteration."""


class _Workspace:
    """Equality-form problem state shared by both phases."""

    __slots__ = (
        "A", "AT", "sparse", "b", "cost", "lower", "upper", "fixed",
        "n_struct", "art_cols", "x", "vstat", "basis", "binv", "m",
    )

    def column(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        """Row indices and values of column j."""
        if self.sparse:
            a = self.A
            lo, hi = a.indptr[j], a.indptr[j + 1]
            return a.indices[lo:hi], a.data[lo:hi]
        col = self.A[:, j]
        idx = np.nonzero(col)[0]
        return idx, col[idx]

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.A @ x

    def rmatvec(self, y: np.ndarray) -> np.ndarray:
        return self.AT @ y

    def refresh_fixed(self) -> None:
        self.fixed = self.lower == self.upper


def _build_workspace(
    lp: LinearProgram, lower: np.ndarray, upper: np.ndarray
) -> _Workspace:
    m = lp.n_rows
    n = lp.n_variables

    ent_rows: list[int] = []
    ent_cols: list[int] = []
    ent_vals: list[float] = []
    struct_nnz = np.zeros(n, dtype=np.int64)
    for i, row in enumerate(lp.rows):
        for idx, coef in row.coeffs:
            if coef != 0.0:
                ent_rows.append(i)
                ent_cols.append(idx)
                ent_vals.append(coef)
                struct_nnz[idx] += 1

    col_lower = list(lower)
    col_upper = list(upper)
    slack_of_row: list[int | None] = []
    for i, row in enumerate(lp.rows):
        if row.relation is Relation.EQ:
            slack_of_row.append(None)
            continue
        j = len(col_lower)
        ent_rows.append(i)
        ent_cols.append(j)
        ent_vals.append(1.0)
        if row.relation is Relation.LE:
            col_lower.append(0.0)
            col_upper.append(math.inf)
        else:
            col_lower.append(-math.inf)
            col_upper.append(0.0)
        slack_of_row.append(j)

    # start every structural/slack variable at a bound (zero when free)
    x0 = np.empty(len(col_lower))
    for j in range(len(col_lower)):
        lo, hi = col_lower[j], col_upper[j]
        if math.isfinite(lo):
            x0[j] = lo
        elif math.isfinite(hi):
            x0[j] = hi
        else:
            x0[j] = 0.0

    b = np.array([row.rhs for row in lp.rows], dtype=float)
    partial = sp.csc_matrix(
        (ent_vals, (ent_rows, ent_cols)), shape=(m, len(col_lower))
    )
    residual = b - partial @ x0

    # crash order per row: the slack, then a singleton structural column
    # whose bounds admit the implied value, then a fresh artificial
    basis = np.empty(m, dtype=np.int64)
    basis_entry = np.empty(m)  # the single matrix entry of each basis column
    x_list = list(x0)
    art_cols: list[int] = []
    for i in range(m):
        r = residual[i]
        s = slack_of_row[i]
        if s is not None and col_lower[s] <= r <= col_upper[s]:
            basis[i] = s
            basis_entry[i] = 1.0
            x_list[s] = r
            continue
        chosen = -1
        for idx, coef in lp.rows[i].coeffs:
            if coef == 0.0 or struct_nnz[idx] != 1:
                continue
            target = x0[idx] + r / coef
            if col_lower[idx] <= target <= col_upper[idx]:
                chosen = idx
                basis_entry[i] = coef
                x_list[idx] = target
                break
        if chosen >= 0:
            basis[i] = chosen
            continue
        j = len(col_lower)
        ent_rows.append(i)
        ent_cols.append(j)
        sign = 1.0 if r >= 0.0 else -1.0
        ent_vals.append(sign)
        basis_entry[i] = sign
        col_lower.append(0.0)
        col_upper.append(math.inf)
        x_list.append(abs(r))
        basis[i] = j
        art_cols.append(j)

    n_total = len(col_lower)
    ws = _Workspace()
    ws.m = m
    ws.sparse = m * n_total > _DENSE_CUTOFF
    mat = sp.csc_matrix((ent_vals, (ent_rows, ent_cols)), shape=(m, n_total))
    if ws.sparse:
        ws.A = mat
        ws.AT = mat.T.tocsr()
    else:
        ws.A = mat.toarray()
        ws.AT = ws.A.T.copy()
    ws.b = b
    ws.lower = np.array(col_lower)
    ws.upper = np.array(col_upper)
    ws.n_struct = n
    ws.art_cols = np.array(art_cols, dtype=np.int64)
    ws.x = np.array(x_list)
    ws.vstat = np.empty(n_total, dtype=np.int8)
    finite_lo = np.isfinite(ws.lower)
    finite_hi = np.isfinite(ws.upper)
    ws.vstat[:] = np.where(finite_lo, _NB_LOWER, np.where(finite_hi, _NB_UPPER, _NB_FREE))
    ws.vstat[basis] = _BASIC
    ws.basis = basis
    ws.cost = np.concatenate([lp.objective, np.zeros(n_total - n)])
    ws.refresh_fixed()

    # the basis member of row i touches only row i, so the starting basis is
    # diagonal and its inverse needs no factorization
    binv = np.zeros((m, m), order="F")
    binv[np.arange(m), np.arange(m)] = 1.0 / basis_entry
    ws.binv = binv
    return ws


def _refactor(ws: _Workspace) -> None:
    """Rebuild the basis inverse from scratch and resynchronize basic values."""
    if ws.sparse:
        bmat = ws.A[:, ws.basis].toarray()
    else:
        bmat = ws.A[:, ws.basis]
    try:
        ws.binv = np.asfortranarray(np.linalg.inv(bmat))
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(
            "basis matrix became singular during refactorization; "
            "the problem is too ill-conditioned for this engine"
        ) from exc
    _resync_basics(ws)


def _resync_basics(ws: _Workspace) -> None:
    x_nb = ws.x.copy()
    x_nb[ws.basis] = 0.0
    ws.x[ws.basis] = ws.binv @ (ws.b - ws.matvec(x_nb))


def _reduced_costs(ws: _Workspace, cost: np.ndarray) -> np.ndarray:
    y = cost[ws.basis] @ ws.binv
    d = cost - ws.rmatvec(y)
    d[ws.basis] = 0.0
    return d


def _choose_entering(
    ws: _Workspace, d: np.ndarray, tol: float, bland: bool
) -> tuple[int, int] | None:
    """Pick (entering column, direction) or None when phase-optimal."""
    down = (ws.vstat == _NB_LOWER) & ~ws.fixed & (d < -tol)
    up = (ws.vstat == _NB_UPPER) & ~ws.fixed & (d > tol)
    free = (ws.vstat == _NB_FREE) & (np.abs(d) > tol)
    eligible = down | up | free
    if not eligible.any():
        return None
    if bland:
        j = int(np.flatnonzero(eligible)[0])
    else:
        score = np.where(eligible, np.abs(d), -1.0)
        j = int(np.argmax(score))
    sigma = 1 if (down[j] or (free[j] and d[j] < 0.0)) else -1
    return j, sigma


def _ratio_test(
    ws: _Workspace, j: int, sigma: int, w: np.ndarray, bland: bool
) -> tuple[float, int | None, bool]:
    """Largest feasible step; returns (t, blocking row or None, leaving-at-upper)."""
    xb = ws.x[ws.basis]
    rate = -sigma * w
    lo_b = ws.lower[ws.basis]
    up_b = ws.upper[ws.basis]

    t = np.full(ws.m, math.inf)
    dec = rate < -_PIVOT_TOL
    inc = rate > _PIVOT_TOL
    with np.errstate(invalid="ignore"):
        t[dec] = (xb[dec] - lo_b[dec]) / -rate[dec]
        t[inc] = (up_b[inc] - xb[inc]) / rate[inc]
    t[np.isnan(t)] = math.inf  # infinite bound on a blocked move
    np.clip(t, 0.0, None, out=t)

    t_min = float(t.min()) if ws.m else math.inf
    span = ws.upper[j] - ws.lower[j]
    t_bound = span if math.isfinite(span) else math.inf

    if t_bound <= t_min + _RATIO_TIE:
        if math.isinf(t_bound) and math.isinf(t_min):
            return math.inf, None, False
        return t_bound, None, False

    window = t <= t_min * (1.0 + _RATIO_TIE) + _RATIO_TIE
    cand = np.flatnonzero(window)
    if bland:
        r = int(cand[np.argmin(ws.basis[cand])])
    else:
        r = int(cand[np.argmax(np.abs(w[cand]))])
    return t_min, r, bool(rate[r] > 0.0)


def _pivot(ws: _Workspace, j: int, sigma: int, w: np.ndarray, r: int, t: float,
           leaves_at_upper: bool) -> None:
    if abs(w[r]) < _PIVOT_TOL:
        raise _Numerics("pivot element below tolerance")
    ws.x[ws.basis] -= sigma * t * w
    entering_val = ws.x[j] + sigma * t
    leaving = int(ws.basis[r])
    ws.x[leaving] = ws.upper[leaving] if leaves_at_upper else ws.lower[leaving]
    ws.vstat[leaving] = _NB_UPPER if leaves_at_upper else _NB_LOWER
    ws.basis[r] = j
    ws.vstat[j] = _BASIC
    ws.x[j] = entering_val

    pivot_row = ws.binv[r] / w[r]
    # rank-one inverse update, in place on the Fortran-ordered matrix
    ws.binv = dger(-1.0, w, pivot_row, a=ws.binv, overwrite_a=1)
    ws.binv[r] = pivot_row


def _run_phase(
    ws: _Workspace,
    cost: np.ndarray,
    cfg: SolverConfig,
    state: dict,
    confirm: bool = True,
) -> str:
    """Iterate to optimality for one cost vector.

    Returns 'optimal', 'unbounded', or 'iteration_limit'.  `state` carries
    the iteration counter, the Bland flag, and stall bookkeeping across
    phases.  With `confirm`, a fresh factorization must reproduce the
    optimal/unbounded verdict before it is returned.
    """
    best = math.inf
    since_improve = 0
    since_refactor = 0
    since_resync = 0

    while True:
        d = _reduced_costs(ws, cost)
        pick = _choose_entering(ws, d, cfg.optimality_tol, state["bland"])
        if pick is None:
            if confirm and state["dirty"]:
                _refactor(ws)
                state["dirty"] = False
                continue
            return "optimal"

        if state["iterations"] >= cfg.max_iterations:
            return "iteration_limit"
        state["iterations"] += 1

        j, sigma = pick
        idx, vals = ws.column(j)
        w = np.zeros(ws.m)
        if len(idx):
            w[:] = ws.binv[:, idx] @ vals

        try:
            t, r, at_upper = _ratio_test(ws, j, sigma, w, state["bland"])
            if math.isinf(t):
                if confirm and state["dirty"]:
                    _refactor(ws)
                    state["dirty"] = False
                    continue
                return "unbounded"
            if r is None:
                # bound flip: the entering variable crosses to its other bound
                ws.x[ws.basis] -= sigma * t * w
                ws.x[j] = ws.upper[j] if sigma > 0 else ws.lower[j]
                ws.vstat[j] = _NB_UPPER if sigma > 0 else _NB_LOWER
            else:
                _pivot(ws, j, sigma, w, r, t, at_upper)
                state["dirty"] = True
                since_refactor += 1
        except _Numerics:
            _refactor(ws)
            state["dirty"] = False
            continue

        since_resync += 1
        if since_refactor >= _REFACTOR_EVERY:
            _refactor(ws)
            state["dirty"] = False
            since_refactor = 0
            since_resync = 0
        elif since_resync >= _RESYNC_EVERY:
            _resync_basics(ws)
            since_resync = 0

        obj = float(cost @ ws.x)
        if obj < best - 1e-12 * (1.0 + abs(best)):
            best = obj
            since_improve = 0
        else:
            since_improve += 1
            if since_improve >= cfg.stall_iterations and not state["bland"]:
                state["bland"] = True


def solve_lp(lp: LinearProgram, config: SolverConfig | None = None) -> Solution:
    """Solve the continuous relaxation of `lp` (integrality flags ignored)."""
    lower, upper = lp.bounds_arrays()
    return solve_lp_with_bounds(lp, lower, upper, config)


def solve_lp_with_bounds(
    lp: LinearProgram,
    lower: np.ndarray,
    upper: np.ndarray,
    config: SolverConfig | None = None,
) -> Solution:
    """Solve with overriding variable bounds (used by branch and bound)."""
    cfg = config or SolverConfig()
    if np.any(lower > upper):
        return Solution(SolveStatus.INFEASIBLE, math.inf, None)

    ws = _build_workspace(lp, lower, upper)
    state = {"iterations": 0, "bland": False, "dirty": False}
    n = ws.n_struct

    if len(ws.art_cols):
        phase1 = np.zeros_like(ws.cost)
        phase1[ws.art_cols] = 1.0
        outcome = _run_phase(ws, phase1, cfg, state, confirm=False)
        if outcome == "iteration_limit":
            return Solution(
                SolveStatus.ITERATION_LIMIT,
                float(lp.objective @ ws.x[:n]),
                ws.x[:n].copy(),
                iterations=state["iterations"],
            )
        if outcome == "unbounded":
            raise RuntimeError("phase 1 cannot be unbounded; numerical breakdown")
        scale = 1.0 + float(np.abs(ws.b).max()) if ws.m else 1.0
        infeas = float(ws.x[ws.art_cols].sum())
        if infeas > cfg.feasibility_tol * scale and state["dirty"]:
            # make sure infeasibility is not an artifact of inverse drift
            _refactor(ws)
            state["dirty"] = False
            outcome = _run_phase(ws, phase1, cfg, state, confirm=True)
            if outcome == "iteration_limit":
                return Solution(
                    SolveStatus.ITERATION_LIMIT,
                    float(lp.objective @ ws.x[:n]),
                    ws.x[:n].copy(),
                    iterations=state["iterations"],
                )
            infeas = float(ws.x[ws.art_cols].sum())
        if infeas > cfg.feasibility_tol * scale:
            return Solution(
                SolveStatus.INFEASIBLE, math.inf, None,
                iterations=state["iterations"],
            )
        # pin artificials at zero for phase 2; basic ones stay as degenerate zeros
        ws.lower[ws.art_cols] = 0.0
        ws.upper[ws.art_cols] = 0.0
        ws.x[ws.art_cols] = np.where(
            ws.vstat[ws.art_cols] == _BASIC, ws.x[ws.art_cols], 0.0
        )
        ws.refresh_fixed()
        state["bland"] = False

    outcome = _run_phase(ws, ws.cost, cfg, state, confirm=True)
    values = ws.x[:n].copy()
    objective = float(lp.objective @ values)
    if outcome == "optimal":
        return Solution(
            SolveStatus.OPTIMAL, objective, values, iterations=state["iterations"]
        )
    if outcome == "unbounded":
        return Solution(
            SolveStatus.UNBOUNDED, -math.inf, values, iterations=state["iterations"]
        )
    return Solution(
        SolveStatus.ITERATION_LIMIT, objective, values, iterations=state["iterations"]
    )
