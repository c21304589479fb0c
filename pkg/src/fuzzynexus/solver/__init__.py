"""Self-contained LP/MILP engine: bounded-variable simplex plus branch and bound."""

from fuzzynexus.solver.branch_bound import solve_milp
from fuzzynexus.solver.problem import (
    LinearProgram,
    Relation,
    Solution,
    SolveStatus,
    SolverConfig,
    VarKind,
    check_feasible,
    max_violation,
    objective_value,
    to_lp_text,
)
from fuzzynexus.solver.simplex import solve_lp

__all__ = [
    "LinearProgram",
    "Relation",
    "Solution",
    "SolveStatus",
    "SolverConfig",
    "VarKind",
    "check_feasible",
    "max_violation",
    "objective_value",
    "solve_lp",
    "solve_milp",
    "to_lp_text",
]
