"""MILP engine tests: brute-force oracles, classification, limits."""

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
    VarKind,
    max_violation,
    solve_lp,
    solve_milp,
)


def knapsack_lp(weights, values, capacity):
    lp = LinearProgram()
    idx = [
        lp.add_variable(f"pick{i}", 0.0, 1.0, kind=VarKind.BINARY, objective=-v)
        for i, v in enumerate(values)
    ]
    lp.add_row("cap", [(j, w) for j, w in zip(idx, weights)], Relation.LE, capacity)
    return lp


def test_knapsack_against_subset_enumeration():
    weights = (2.0, 3.0, 4.0, 5.0, 6.0)
    values = (3.0, 4.0, 5.0, 6.0, 7.0)
    best = 0.0
    for picks in itertools.product((0, 1), repeat=5):
        if sum(p * w for p, w in zip(picks, weights)) <= 10.0:
            best = max(best, sum(p * v for p, v in zip(picks, values)))
    assert best == 13.0

    sol = solve_milp(knapsack_lp(weights, values, 10.0))
    assert sol.status is SolveStatus.OPTIMAL
    assert sol.objective == pytest.approx(-13.0, abs=1e-9)


def test_all_continuous_identical_to_lp():
    lp = LinearProgram()
    x = lp.add_variable("x", 0.0, 4.0, objective=-1.0)
    y = lp.add_variable("y", 0.0, 4.0, objective=-2.0)
    lp.add_row("r", [(x, 1.0), (y, 1.0)], Relation.LE, 5.0)
    a = solve_lp(lp)
    b = solve_milp(lp)
    assert a.status is b.status and a.objective == b.objective
    assert np.array_equal(a.values, b.values)


def test_fractional_equality_on_binary_infeasible():
    lp = LinearProgram()
    y = lp.add_variable("y", 0.0, 1.0, kind=VarKind.BINARY, objective=1.0)
    lp.add_row("half", [(y, 1.0)], Relation.EQ, 0.5)
    sol = solve_milp(lp)
    assert sol.status is SolveStatus.INFEASIBLE
    assert sol.values is None


def test_relaxation_bounds_milp_from_below():
    rng = np.random.default_rng(11)
    for _ in range(30):
        lp = _random_milp(rng)
        relax = solve_lp(lp)
        integer = solve_milp(lp)
        if relax.status is SolveStatus.OPTIMAL and integer.status is SolveStatus.OPTIMAL:
            assert relax.objective <= integer.objective + 1e-7


def _random_milp(rng, n_bin=None, n_cont=None):
    n_bin = int(n_bin if n_bin is not None else rng.integers(1, 7))
    n_cont = int(n_cont if n_cont is not None else rng.integers(0, 5))
    lp = LinearProgram()
    cols = []
    for j in range(n_bin):
        cols.append(
            lp.add_variable(
                f"b{j}", 0.0, 1.0, kind=VarKind.BINARY, objective=float(rng.normal())
            )
        )
    for j in range(n_cont):
        cols.append(
            lp.add_variable(
                f"c{j}", 0.0, float(rng.uniform(1.0, 5.0)), objective=float(rng.normal())
            )
        )
    rels = [Relation.LE, Relation.GE, Relation.EQ]
    for i in range(int(rng.integers(1, 5))):
        nnz = int(rng.integers(1, len(cols) + 1))
        chosen = rng.choice(len(cols), size=nnz, replace=False)
        coeffs = [(int(j), float(rng.normal())) for j in chosen]
        rel = rels[int(rng.integers(0, 3))] if rng.random() < 0.35 else Relation.LE
        lp.add_row(f"r{i}", coeffs, rel, float(rng.normal() * 2.0))
    return lp


def _oracle_enumerate(lp):
    """Independent optimum: enumerate binary patterns, LP-solve the rest via scipy."""
    binaries = lp.binary_indices()
    n = lp.n_variables
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
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
    best = math.inf
    for pattern in itertools.product((0.0, 1.0), repeat=len(binaries)):
        bounds = []
        fixed = dict(zip(binaries, pattern))
        for j, v in enumerate(lp.variables):
            if j in fixed:
                bounds.append((fixed[j], fixed[j]))
            else:
                bounds.append(
                    (
                        None if math.isinf(v.lower) else v.lower,
                        None if math.isinf(v.upper) else v.upper,
                    )
                )
        res = linprog(
            c=lp.objective,
            A_ub=np.array(a_ub) if a_ub else None,
            b_ub=np.array(b_ub) if b_ub else None,
            A_eq=np.array(a_eq) if a_eq else None,
            b_eq=np.array(b_eq) if b_eq else None,
            bounds=bounds,
            method="highs",
        )
        if res.status == 0:
            best = min(best, res.fun)
    return best


def test_random_milps_match_enumeration_oracle():
    rng = np.random.default_rng(404)
    for _ in range(60):
        lp = _random_milp(rng)
        oracle = _oracle_enumerate(lp)
        mine = solve_milp(lp)
        if math.isinf(oracle):
            assert mine.status is SolveStatus.INFEASIBLE, "oracle says infeasible"
        else:
            assert mine.status is SolveStatus.OPTIMAL
            assert mine.objective == pytest.approx(oracle, abs=1e-6)
            assert max_violation(lp, mine.values) <= 1e-6
            for j in lp.binary_indices():
                assert abs(mine.values[j] - round(mine.values[j])) <= 1e-6


def test_node_limit_returns_incumbent_status():
    rng = np.random.default_rng(3)
    # a knapsack-ish instance large enough to need several nodes
    weights = rng.uniform(1.0, 10.0, size=12)
    values = rng.uniform(1.0, 10.0, size=12)
    lp = knapsack_lp(weights, values, float(weights.sum()) * 0.43)
    sol = solve_milp(lp, SolverConfig(max_nodes=2))
    assert sol.status is SolveStatus.NODE_LIMIT


def test_milp_determinism():
    rng = np.random.default_rng(9)
    for _ in range(10):
        lp = _random_milp(rng)
        a = solve_milp(lp)
        b = solve_milp(lp)
        assert a.status is b.status
        assert a.nodes == b.nodes
        if a.values is not None:
            assert np.array_equal(a.values, b.values)


def test_unbounded_relaxation_propagates():
    lp = LinearProgram()
    lp.add_variable("b", 0.0, 1.0, kind=VarKind.BINARY, objective=1.0)
    lp.add_variable("x", 0.0, math.inf, objective=-1.0)
    sol = solve_milp(lp)
    assert sol.status is SolveStatus.UNBOUNDED


def test_node_limit_incumbent_is_feasible_when_present():
    rng = np.random.default_rng(3)
    weights = rng.uniform(1.0, 10.0, size=12)
    values = rng.uniform(1.0, 10.0, size=12)
    lp = knapsack_lp(weights, values, float(weights.sum()) * 0.43)
    sol = solve_milp(lp, SolverConfig(max_nodes=3))
    assert sol.status is SolveStatus.NODE_LIMIT
    if sol.values is not None:
        assert max_violation(lp, sol.values) <= 1e-6
        assert sol.objective == pytest.approx(
            float(np.dot(lp.objective, sol.values)), abs=1e-9
        )
