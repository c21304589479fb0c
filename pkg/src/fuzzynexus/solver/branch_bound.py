"""Best-first branch and bound over binary variables.

Nodes are ordered by their LP-relaxation bound, so the first incumbent that
closes the relative gap against the best open bound is optimal.  Branching
fixes the most fractional binary (ties to the lowest variable index) to 0
and to 1; child relaxations are solved when the node is created so that the
queue always holds true bounds.  A cheap round-and-verify heuristic runs on
every fractional node, and the root additionally tries fixing all binaries
at their rounded values and re-solving the continuous rest; heuristic
points only become incumbents after an independent feasibility check
against the original rows.
"""

from __future__ import annotations

import heapq
import math

import numpy as np

from fuzzynexus.solver.problem import (
    LinearProgram,
    SolveStatus,
    Solution,
    SolverConfig,
    check_feasible,
    objective_value,
)
from fuzzynexus.solver.simplex import solve_lp, solve_lp_with_bounds


def _fractional(values: np.ndarray, binaries: list[int], tol: float) -> list[tuple[int, float]]:
    out = []
    for j in binaries:
        frac = abs(values[j] - round(values[j]))
        if frac > tol:
            out.append((j, frac))
    return out


def solve_milp(lp: LinearProgram, config: SolverConfig | None = None) -> Solution:
    """Minimize `lp` with its binary variables restricted to {0, 1}."""
    cfg = config or SolverConfig()
    lower, upper = lp.bounds_arrays()
    binaries = [j for j in lp.binary_indices() if lower[j] < upper[j]]

    root = solve_lp(lp, cfg)
    nodes = 1
    iterations = root.iterations
    if root.status is not SolveStatus.OPTIMAL or not binaries:
        root.nodes = nodes
        return root

    incumbent_obj = math.inf
    incumbent: np.ndarray | None = None

    def gap_closed(bound: float) -> bool:
        return incumbent_obj - bound <= cfg.mip_gap * max(1.0, abs(incumbent_obj))

    def consider(obj: float, values: np.ndarray) -> None:
        nonlocal incumbent_obj, incumbent
        if obj < incumbent_obj:
            incumbent_obj = obj
            incumbent = values.copy()

    def try_rounding(values: np.ndarray, at_root: bool) -> None:
        nonlocal nodes, iterations
        # nearest, all-up, and all-down candidates; verification against the
        # original rows decides, so a bad candidate costs one cheap row scan
        candidates = []
        for mode in ("nearest", "up", "down"):
            cand = values.copy()
            for j in binaries:
                v = cand[j]
                if mode == "nearest":
                    cand[j] = float(round(v))
                elif mode == "up":
                    cand[j] = 1.0 if v > cfg.integrality_tol else 0.0
                else:
                    cand[j] = 0.0 if v < 1.0 - cfg.integrality_tol else 1.0
            candidates.append(cand)
        found = False
        for cand in candidates:
            if check_feasible(lp, cand, cfg.feasibility_tol):
                consider(objective_value(lp, cand), cand)
                found = True
        if found or not at_root:
            return
        lo, hi = lower.copy(), upper.copy()
        for j in binaries:
            lo[j] = hi[j] = candidates[0][j]
        fixed = solve_lp_with_bounds(lp, lo, hi, cfg)
        nodes += 1
        iterations += fixed.iterations
        if fixed.status is SolveStatus.OPTIMAL:
            consider(fixed.objective, fixed.values)

    heap: list = []
    seq = 0
    heapq.heappush(heap, (root.objective, seq, lower, upper, root.values))

    first = True
    while heap:
        bound, _, node_lo, node_hi, values = heapq.heappop(heap)
        if incumbent is not None and gap_closed(bound):
            break

        fracs = _fractional(values, binaries, cfg.integrality_tol)
        if not fracs:
            consider(float(np.dot(lp.objective, values)), values)
            continue

        try_rounding(values, at_root=first)
        first = False
        if incumbent is not None and gap_closed(bound):
            break

        branch_j = max(fracs, key=lambda jf: (jf[1], -jf[0]))[0]
        for fix in (0.0, 1.0):
            if nodes >= cfg.max_nodes:
                return Solution(
                    SolveStatus.NODE_LIMIT,
                    incumbent_obj if incumbent is not None else math.inf,
                    incumbent,
                    iterations=iterations,
                    nodes=nodes,
                )
            lo, hi = node_lo.copy(), node_hi.copy()
            lo[branch_j] = hi[branch_j] = fix
            child = solve_lp_with_bounds(lp, lo, hi, cfg)
            nodes += 1
            iterations += child.iterations
            if child.status is SolveStatus.INFEASIBLE:
                continue
            if child.status is not SolveStatus.OPTIMAL:
                return Solution(
                    child.status,
                    incumbent_obj if incumbent is not None else child.objective,
                    incumbent if incumbent is not None else child.values,
                    iterations=iterations,
                    nodes=nodes,
                )
            if not _fractional(child.values, binaries, cfg.integrality_tol):
                consider(child.objective, child.values)
            elif incumbent is None or not gap_closed(child.objective):
                seq += 1
                heapq.heappush(heap, (child.objective, seq, lo, hi, child.values))

    if incumbent is None:
        return Solution(
            SolveStatus.INFEASIBLE, math.inf, None, iterations=iterations, nodes=nodes
        )
    return Solution(
        SolveStatus.OPTIMAL, incumbent_obj, incumbent, iterations=iterations, nodes=nodes
    )
