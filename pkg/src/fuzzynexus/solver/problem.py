"""Linear/mixed-integer program container, solver configuration, and checking helpers.

Problems are always minimization.  Variables carry bounds and a continuous
or binary flag; constraint rows are sparse (variable, coefficient) pairs
with a <=, =, or >= relation.  The row-evaluation helpers here are
deliberately independent of the solver internals so that feasibility of a
returned point can be audited from the problem data alone.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np


class Relation(enum.Enum):
    LE = "<="
    EQ = "="
    GE = ">="


class VarKind(enum.Enum):
    CONTINUOUS = "continuous"
    BINARY = "binary"


class SolveStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"
    NODE_LIMIT = "node_limit"


@dataclass(frozen=True)
class Variable:
    name: str
    lower: float
    upper: float
    kind: VarKind


@dataclass(frozen=True)
class Row:
    name: str
    coeffs: tuple[tuple[int, float], ...]
    relation: Relation
    rhs: float


@dataclass
class SolverConfig:
    """Tolerances and limits for the LP/MILP engine.

    `stall_iterations` is the number of simplex iterations without objective
    improvement after which pricing switches from steepest-violation to
    Bland's rule to rule out cycling.
    """

    feasibility_tol: float = 1e-7
    integrality_tol: float = 1e-6
    mip_gap: float = 1e-6
    max_iterations: int = 200_000
    max_nodes: int = 100_000
    optimality_tol: float = 1e-9
    stall_iterations: int = 500

    def __post_init__(self) -> None:
        for name in ("feasibility_tol", "integrality_tol", "mip_gap", "optimality_tol"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        for name in ("max_iterations", "max_nodes", "stall_iterations"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class Solution:
    """Result of one solve: status, objective, and per-variable values.

    `values` is None when no point is available (infeasible, or a node
    limit hit before any incumbent was found).
    """

    status: SolveStatus
    objective: float
    values: np.ndarray | None
    iterations: int = 0
    nodes: int = 0


class LinearProgram:
    """Builder for a minimization problem over bounded variables."""

    def __init__(self) -> None:
        self.variables: list[Variable] = []
        self.rows: list[Row] = []
        self._objective: list[float] = []

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def objective(self) -> np.ndarray:
        return np.asarray(self._objective, dtype=float)

    def add_variable(
        self,
        name: str,
        lower: float = 0.0,
        upper: float = math.inf,
        kind: VarKind = VarKind.CONTINUOUS,
        objective: float = 0.0,
    ) -> int:
        """Append a variable and return its index."""
        if math.isnan(lower) or math.isnan(upper):
            raise ValueError(f"variable {name!r}: bounds must not be NaN")
        if lower > upper:
            raise ValueError(f"variable {name!r}: lower {lower} exceeds upper {upper}")
        if kind is VarKind.BINARY and (lower < 0.0 or upper > 1.0):
            raise ValueError(f"variable {name!r}: binary bounds must lie within [0, 1]")
        self.variables.append(Variable(name, float(lower), float(upper), kind))
        self._objective.append(float(objective))
        return len(self.variables) - 1

    def add_row(
        self,
        name: str,
        coeffs,
        relation: Relation,
        rhs: float,
    ) -> int:
        """Append a constraint row; `coeffs` is an iterable of (var index, coef)."""
        merged: dict[int, float] = {}
        for idx, coef in coeffs:
            if not 0 <= idx < len(self.variables):
                raise ValueError(f"row {name!r} references unknown variable {idx}")
            merged[idx] = merged.get(idx, 0.0) + float(coef)
        items = tuple(sorted(merged.items()))
        self.rows.append(Row(name, items, relation, float(rhs)))
        return len(self.rows) - 1

    def bounds_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        lower = np.array([v.lower for v in self.variables], dtype=float)
        upper = np.array([v.upper for v in self.variables], dtype=float)
        return lower, upper

    def binary_indices(self) -> list[int]:
        return [j for j, v in enumerate(self.variables) if v.kind is VarKind.BINARY]


def row_activity(row: Row, values: np.ndarray) -> float:
    return float(sum(coef * values[idx] for idx, coef in row.coeffs))


def max_violation(lp: LinearProgram, values: np.ndarray) -> float:
    """Largest bound or row violation of a candidate point (0 when feasible)."""
    worst = 0.0
    for j, var in enumerate(lp.variables):
        worst = max(worst, var.lower - values[j], values[j] - var.upper)
    for row in lp.rows:
        act = row_activity(row, values)
        if row.relation is Relation.LE:
            worst = max(worst, act - row.rhs)
        elif row.relation is Relation.GE:
            worst = max(worst, row.rhs - act)
        else:
            worst = max(worst, abs(act - row.rhs))
    return worst


def check_feasible(lp: LinearProgram, values: np.ndarray, tol: float) -> bool:
    return max_violation(lp, values) <= tol


def objective_value(lp: LinearProgram, values: np.ndarray) -> float:
    return float(np.dot(lp.objective, values))


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def to_lp_text(lp: LinearProgram) -> str:
    """Render the problem in a human-readable LP-text style for cross-checks."""
    out: list[str] = ["Minimize"]
    terms = [
        f"{'+' if c >= 0 else '-'} {_fmt(abs(c))} {lp.variables[j].name}"
        for j, c in enumerate(lp.objective)
        if c != 0.0
    ]
    out.append(" obj: " + (" ".join(terms).lstrip("+ ") if terms else "0"))
    out.append("Subject To")
    for row in lp.rows:
        body = " ".join(
            f"{'+' if coef >= 0 else '-'} {_fmt(abs(coef))} {lp.variables[idx].name}"
            for idx, coef in row.coeffs
        ).lstrip("+ ")
        out.append(f" {row.name}: {body or '0'} {row.relation.value} {_fmt(row.rhs)}")
    out.append("Bounds")
    for var in lp.variables:
        lo = "-inf" if math.isinf(var.lower) else _fmt(var.lower)
        hi = "+inf" if math.isinf(var.upper) else _fmt(var.upper)
        out.append(f" {lo} <= {var.name} <= {hi}")
    binaries = [v.name for v in lp.variables if v.kind is VarKind.BINARY]
    if binaries:
        out.append("Binaries")
        for name in binaries:
            out.append(f" {name}")
    out.append("End")
    return "\n".join(out) + "\n"
