import numpy as np
import pytest
from scipy.optimize import linprog

from fswgraph.lp import (
    LpInfeasibleError,
    LpIterationError,
    LpProblem,
    LpUnboundedError,
    lp_solve,
)


def transportation_problem(cost, row_marginals, col_marginals):
    """Equality-form LP for min <cost, X> with fixed row and column sums."""
    cost = np.asarray(cost, dtype=float)
    n, m = cost.shape
    a = np.zeros((n + m, n * m))
    for i in range(n):
        a[i, i * m:(i + 1) * m] = 1.0
    for j in range(m):
        a[n + j, j::m] = 1.0
    b = np.concatenate([row_marginals, col_marginals])
    return LpProblem(cost.ravel(), a, b)


def test_single_variable():
    value, x = lp_solve(LpProblem([1.0], [[1.0]], [1.0]))
    assert value == pytest.approx(1.0, abs=1e-12)
    assert x == pytest.approx([1.0], abs=1e-12)


def test_tiny_transportation():
    problem = transportation_problem([[0.0, 1.0], [1.0, 0.0]], [0.5, 0.5], [0.5, 0.5])
    value, x = lp_solve(problem)
    assert value == pytest.approx(0.0, abs=1e-12)
    assert x.reshape(2, 2) == pytest.approx(np.eye(2) * 0.5, abs=1e-12)


def test_beale_cycling_instance():
    """Beale's classic example that cycles without an anti-cycling rule."""
    a = np.array([
        [0.25, -60.0, -1.0 / 25.0, 9.0, 1.0, 0.0, 0.0],
        [0.50, -90.0, -1.0 / 50.0, 3.0, 0.0, 1.0, 0.0],
        [0.00, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
    ])
    b = np.array([0.0, 0.0, 1.0])
    c = np.array([-0.75, 150.0, -0.02, 6.0, 0.0, 0.0, 0.0])
    value, x = lp_solve(LpProblem(c, a, b))
    assert value == pytest.approx(-0.05, abs=1e-12)
    assert x[:4] == pytest.approx([0.04, 0.0, 1.0, 0.0], abs=1e-9)


def test_duplicate_rows_are_harmless():
    value, x = lp_solve(LpProblem([1.0, 2.0], [[1.0, 1.0], [1.0, 1.0]], [1.0, 1.0]))
    assert value == pytest.approx(1.0, abs=1e-12)
    assert x == pytest.approx([1.0, 0.0], abs=1e-12)


def test_all_zero_rows():
    value, x = lp_solve(LpProblem([1.0, 1.0], [[0.0, 0.0]], [0.0]))
    assert value == 0.0
    assert np.array_equal(x, np.zeros(2))


def test_zero_rows_with_profitable_direction_unbounded():
    with pytest.raises(LpUnboundedError):
        lp_solve(LpProblem([-1.0, 0.0], [[0.0, 0.0]], [0.0]))


def test_infeasible_negative_sum():
    with pytest.raises(LpInfeasibleError):
        lp_solve(LpProblem([1.0, 1.0], [[1.0, 1.0]], [-1.0]))


def test_infeasible_contradictory_rows():
    with pytest.raises(LpInfeasibleError):
        lp_solve(LpProblem([1.0], [[1.0], [1.0]], [1.0, 2.0]))


def test_unbounded_ray():
    with pytest.raises(LpUnboundedError):
        lp_solve(LpProblem([-1.0, 0.0], [[1.0, -1.0]], [0.0]))


def test_iteration_cap():
    with pytest.raises(LpIterationError):
        lp_solve(LpProblem([-1.0, 0.0], [[1.0, 1.0]], [1.0]), max_iter=0)


def test_problem_validation():
    with pytest.raises(ValueError):
        LpProblem([1.0], [[1.0, 2.0]], [1.0])  # objective length mismatch
    with pytest.raises(ValueError):
        LpProblem([1.0, 2.0], [[1.0, 2.0]], [1.0, 2.0])  # rhs length mismatch
    with pytest.raises(ValueError):
        LpProblem([1.0], [1.0], [1.0])  # constraints not a matrix
    with pytest.raises(ValueError):
        LpProblem([np.nan], [[1.0]], [1.0])


def test_solution_feasibility_random():
    rng = np.random.default_rng(100)
    for _ in range(30):
        n = int(rng.integers(2, 6))
        m = int(rng.integers(2, 6))
        cost = rng.uniform(0.0, 1.0, size=(n, m))
        rows = rng.uniform(0.5, 1.5, size=n)
        rows /= rows.sum()
        cols = rng.uniform(0.5, 1.5, size=m)
        cols /= cols.sum()
        problem = transportation_problem(cost, rows, cols)
        value, x = lp_solve(problem)
        assert np.all(x >= 0)
        assert np.allclose(problem.constraints @ x, problem.rhs, atol=1e-9)
        assert value == pytest.approx(float(problem.objective @ x), abs=1e-9)


def test_matches_independent_solver():
    rng = np.random.default_rng(200)
    for k in range(50):
        n = int(rng.integers(2, 6))
        m = int(rng.integers(2, 6))
        cost = rng.uniform(0.0, 1.0, size=(n, m))
        rows = np.full(n, 1.0 / n)
        cols = np.full(m, 1.0 / m)
        problem = transportation_problem(cost, rows, cols)
        value, _ = lp_solve(problem)
        ref = linprog(
            problem.objective, A_eq=problem.constraints, b_eq=problem.rhs,
            bounds=(0, None), method="highs",
        )
        assert ref.status == 0
        assert abs(value - ref.fun) <= 1e-8, f"case {k}: {value} vs highs {ref.fun}"


def test_deterministic_resolve():
    rng = np.random.default_rng(7)
    cost = rng.uniform(size=(4, 4))
    problem = transportation_problem(cost, np.full(4, 0.25), np.full(4, 0.25))
    v1, x1 = lp_solve(problem)
    v2, x2 = lp_solve(problem)
    assert v1 == v2
    assert np.array_equal(x1, x2)
