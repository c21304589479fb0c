"""LP engine tests: worked examples, classification, and random cross-checks."""

import itertools
import math

import numpy as np
import pytest
from scipy.optimize import linprog

from fuzzynexus.solver import (
    LinearProgram,
    Relation,
    SolveStatus,
    SolverConfig,
    max_violation,
    solve_lp,
)


def lp_single_bound():
    lp = LinearProgram()
    x = lp.add_variable("x", 0.0, 10.0, objective=-1.0)
    lp.add_row("cap", [(x, 1.0)], Relation.LE, 5.0)
    return lp


def test_single_active_bound():
    sol = solve_lp(lp_single_bound())
    assert sol.status is SolveStatus.OPTIMAL
    assert sol.objective == pytest.approx(-5.0, abs=1e-9)
    assert sol.values[0] == pytest.approx(5.0, abs=1e-9)


def _vertex_enumeration_2d(c, rows, bound=1e6):
    """Oracle: optimum of min c.x over x >= 0 and a.x <= b rows, via vertex scan.

    Intersects every pair drawn from the constraint lines and the axes and
    keeps the best feasible point.
    """
    lines = [(np.asarray(a, float), float(b)) for a, b in rows]
    lines.append((np.array([1.0, 0.0]), bound))
    lines.append((np.array([0.0, 1.0]), bound))
    lines.append((np.array([-1.0, 0.0]), 0.0))
    lines.append((np.array([0.0, -1.0]), 0.0))
    best, best_x = math.inf, None
    for (a1, b1), (a2, b2) in itertools.combinations(lines, 2):
        mat = np.array([a1, a2])
        if abs(np.linalg.det(mat)) < 1e-12:
            continue
        x = np.linalg.solve(mat, [b1, b2])
        if x.min() < -1e-9:
            continue
        if all(a @ x <= b + 1e-9 for a, b in lines):
            val = float(np.dot(c, x))
            if val < best:
                best, best_x = val, x
    return best, best_x


def test_two_variable_polytope_matches_vertex_oracle():
    c = [-3.0, -2.0]
    rows = [([1.0, 1.0], 4.0), ([1.0, 3.0], 6.0)]
    oracle_obj, oracle_x = _vertex_enumeration_2d(c, rows)
    assert oracle_obj == pytest.approx(-12.0)
    assert oracle_x == pytest.approx([4.0, 0.0])

    lp = LinearProgram()
    x = lp.add_variable("x", objective=-3.0)
    y = lp.add_variable("y", objective=-2.0)
    lp.add_row("r1", [(x, 1.0), (y, 1.0)], Relation.LE, 4.0)
    lp.add_row("r2", [(x, 1.0), (y, 3.0)], Relation.LE, 6.0)
    sol = solve_lp(lp)
    assert sol.status is SolveStatus.OPTIMAL
    assert sol.objective == pytest.approx(-12.0, abs=1e-9)
    assert sol.values == pytest.approx([4.0, 0.0], abs=1e-9)


def test_contradictory_rows_infeasible():
    lp = LinearProgram()
    x = lp.add_variable("x", -math.inf, math.inf, objective=1.0)
    lp.add_row("lo", [(x, 1.0)], Relation.GE, 2.0)
    lp.add_row("hi", [(x, 1.0)], Relation.LE, 1.0)
    sol = solve_lp(lp)
    assert sol.status is SolveStatus.INFEASIBLE
    assert sol.values is None


def test_unbounded_direction():
    lp = LinearProgram()
    lp.add_variable("x", 0.0, math.inf, objective=-1.0)
    sol = solve_lp(lp)
    assert sol.status is SolveStatus.UNBOUNDED


def test_equality_row_with_free_variable():
    lp = LinearProgram()
    x = lp.add_variable("x", -math.inf, math.inf, objective=2.0)
    y = lp.add_variable("y", 0.0, 10.0, objective=1.0)
    lp.add_row("eq", [(x, 1.0), (y, 1.0)], Relation.EQ, 3.0)
    lp.add_row("floor", [(x, 1.0)], Relation.GE, -5.0)
    sol = solve_lp(lp)
    # push x down to -5, y = 8
    assert sol.status is SolveStatus.OPTIMAL
    assert sol.objective == pytest.approx(-2.0, abs=1e-8)
    assert sol.values == pytest.approx([-5.0, 8.0], abs=1e-8)


def test_iteration_limit_status():
    lp = LinearProgram()
    n = 12
    idx = [lp.add_variable(f"x{i}", 0.0, 1.0, objective=-(i + 1.0)) for i in range(n)]
    for i in range(n - 1):
        lp.add_row(f"r{i}", [(idx[i], 1.0), (idx[i + 1], 1.0)], Relation.LE, 1.5)
    sol = solve_lp(lp, SolverConfig(max_iterations=2))
    assert sol.status is SolveStatus.ITERATION_LIMIT
    assert sol.iterations == 2


def test_fixed_variables_and_degenerate_rows():
    lp = LinearProgram()
    x = lp.add_variable("x", 3.0, 3.0, objective=1.0)
    y = lp.add_variable("y", 0.0, 9.0, objective=1.0)
    lp.add_row("eq", [(x, 1.0), (y, 1.0)], Relation.EQ, 5.0)
    lp.add_row("dup", [(x, 2.0), (y, 2.0)], Relation.EQ, 10.0)  # redundant copy
    sol = solve_lp(lp)
    assert sol.status is SolveStatus.OPTIMAL
    assert sol.values == pytest.approx([3.0, 2.0], abs=1e-9)


def _to_scipy(lp):
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    n = lp.n_variables
    for row in lp.rows:
        dense = np.zeros(n)
        for idx, coef in row.coeffs:
            dense[idx] = coef
        if row.relation is Relation.LE:
            a_ub.append(dense)
            b_ub.append(row.rhs)
        elif row.relation is Relation.GE:
            a_ub.append(-dense)
            b_ub.append(-row.rhs)
        else:
            a_eq.append(dense)
            b_eq.append(row.rhs)
    bounds = [
        (
            None if math.isinf(v.lower) else v.lower,
            None if math.isinf(v.upper) else v.upper,
        )
        for v in lp.variables
    ]
    return dict(
        c=lp.objective,
        A_ub=np.array(a_ub) if a_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=np.array(a_eq) if a_eq else None,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=bounds,
    )


def _random_lp(rng, n=None, m=None):
    n = n or rng.integers(2, 9)
    m = m or rng.integers(1, 7)
    lp = LinearProgram()
    for j in range(n):
        ub = float(rng.uniform(0.5, 10.0)) if rng.random() < 0.8 else math.inf
        lp.add_variable(f"x{j}", 0.0, ub, objective=float(rng.normal()))
    rels = [Relation.LE, Relation.GE, Relation.EQ]
    for i in range(m):
        nnz = rng.integers(1, n + 1)
        cols = rng.choice(n, size=nnz, replace=False)
        coeffs = [(int(j), float(rng.normal())) for j in cols]
        rel = rels[rng.integers(0, 3)] if rng.random() < 0.4 else Relation.LE
        rhs = float(rng.normal() * 3.0)
        lp.add_row(f"r{i}", coeffs, rel, rhs)
    return lp


def test_random_lps_match_scipy_reference():
    rng = np.random.default_rng(2024)
    agree_status = 0
    for _ in range(300):
        lp = _random_lp(rng)
        mine = solve_lp(lp)
        ref = linprog(**_to_scipy(lp), method="highs")
        if ref.status == 0:
            assert mine.status is SolveStatus.OPTIMAL, f"expected optimal: {ref}"
            assert mine.objective == pytest.approx(ref.fun, abs=1e-6, rel=1e-6)
            assert max_violation(lp, mine.values) <= 1e-6
        elif ref.status == 2:
            assert mine.status is SolveStatus.INFEASIBLE
        elif ref.status == 3:
            assert mine.status is SolveStatus.UNBOUNDED
        agree_status += 1
    assert agree_status == 300


def test_returned_point_feasible_by_independent_row_check():
    rng = np.random.default_rng(77)
    for _ in range(100):
        lp = _random_lp(rng)
        sol = solve_lp(lp)
        if sol.status is SolveStatus.OPTIMAL:
            assert max_violation(lp, sol.values) <= 1e-6


def test_deterministic_resolve():
    rng = np.random.default_rng(5)
    for _ in range(20):
        lp = _random_lp(rng)
        a = solve_lp(lp)
        b = solve_lp(lp)
        assert a.status is b.status
        assert a.iterations == b.iterations
        if a.values is not None:
            assert np.array_equal(a.values, b.values)
            assert a.objective == b.objective


def test_bland_pricing_reaches_same_objective():
    # stall threshold of 1 flips to Bland's rule almost immediately; the
    # vertex path changes but the optimum must not
    rng = np.random.default_rng(31)
    bland_cfg = SolverConfig(stall_iterations=1)
    for _ in range(40):
        lp = _random_lp(rng)
        a = solve_lp(lp)
        b = solve_lp(lp, bland_cfg)
        assert a.status is b.status
        if a.status is SolveStatus.OPTIMAL:
            assert b.objective == pytest.approx(a.objective, abs=1e-7, rel=1e-9)
            assert max_violation(lp, b.values) <= 1e-6


def test_solver_config_validation():
    with pytest.raises(ValueError, match="feasibility_tol"):
        SolverConfig(feasibility_tol=0.0)
    with pytest.raises(ValueError, match="mip_gap"):
        SolverConfig(mip_gap=-1e-9)
    with pytest.raises(ValueError, match="max_nodes"):
        SolverConfig(max_nodes=0)


def test_structured_multiperiod_lp_matches_scipy(monkeypatch):
    # block-chained storage problem, solved on both matrix code paths
    T = 30
    rng = np.random.default_rng(99)
    demand = 50.0 + 20.0 * rng.random(T)
    lp = LinearProgram()
    gen, store, slack = [], [], []
    for t in range(T):
        gen.append(lp.add_variable(f"g{t}", 0.0, 80.0, objective=40.0 + rng.random()))
        store.append(lp.add_variable(f"s{t}", 0.0, 25.0))
        slack.append(lp.add_variable(f"u{t}", 0.0, math.inf, objective=5000.0))
        for k in range(7):
            lp.add_variable(f"w{t}_{k}", 0.0, 10.0, objective=0.5 * k)
    for t in range(T):
        coeffs = [(gen[t], 1.0), (slack[t], 1.0)]
        prev = [(store[t - 1], 1.0)] if t > 0 else []
        lp.add_row(f"bal{t}", coeffs + prev + [(store[t], -1.0)], Relation.EQ, demand[t])
    mine = solve_lp(lp)
    ref = linprog(**_to_scipy(lp), method="highs")
    assert mine.status is SolveStatus.OPTIMAL and ref.status == 0
    assert mine.objective == pytest.approx(ref.fun, rel=1e-8)
    assert max_violation(lp, mine.values) <= 1e-6

    from fuzzynexus.solver import simplex as simplex_mod

    monkeypatch.setattr(simplex_mod, "_DENSE_CUTOFF", 0)  # force the sparse path
    sparse = solve_lp(lp)
    assert sparse.status is SolveStatus.OPTIMAL
    assert sparse.objective == pytest.approx(mine.objective, rel=1e-10)
    assert sparse.iterations == mine.iterations


def test_problem_builder_validation():
    lp = LinearProgram()
    x = lp.add_variable("x", 0.0, 1.0)
    with pytest.raises(ValueError, match="unknown variable"):
        lp.add_row("bad", [(x + 5, 1.0)], Relation.LE, 1.0)
    with pytest.raises(ValueError, match="lower"):
        lp.add_variable("y", 2.0, 1.0)
    from fuzzynexus.solver import VarKind

    with pytest.raises(ValueError, match="binary bounds"):
        lp.add_variable("b", -0.5, 1.0, kind=VarKind.BINARY)


def test_duplicate_row_coefficients_merge():
    lp = LinearProgram()
    x = lp.add_variable("x", 0.0, 10.0, objective=1.0)
    lp.add_row("r", [(x, 1.0), (x, 2.0)], Relation.GE, 6.0)
    sol = solve_lp(lp)
    assert sol.status is SolveStatus.OPTIMAL
    assert sol.values[0] == pytest.approx(2.0, abs=1e-9)
