import numpy as np
import pytest
from scipy.optimize import linprog

from persuasion_lab.simplex import (
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    min_max_over_simplex,
    solve_lp,
)


def test_known_optimum():
    # max x1 + 2 x2 s.t. x1 + x2 <= 4, x2 <= 2  ->  (2, 2), value 6.
    res = solve_lp([-1.0, -2.0], A_ub=[[1.0, 1.0], [0.0, 1.0]], b_ub=[4.0, 2.0])
    assert res.status == OPTIMAL
    assert res.fun == pytest.approx(-6.0)
    assert np.allclose(res.x, [2.0, 2.0])


def test_equality_constraints():
    # min x1 + x2 s.t. x1 + 2 x2 = 3  ->  x = (0, 1.5).
    res = solve_lp([1.0, 1.0], A_eq=[[1.0, 2.0]], b_eq=[3.0])
    assert res.status == OPTIMAL
    assert res.fun == pytest.approx(1.5)


def test_infeasible_detected():
    res = solve_lp([1.0], A_ub=[[1.0]], b_ub=[-1.0])
    assert res.status == INFEASIBLE


def test_infeasible_equality_system():
    res = solve_lp([0.0, 0.0], A_eq=[[1.0, 1.0], [1.0, 1.0]], b_eq=[1.0, 2.0])
    assert res.status == INFEASIBLE


def test_unbounded_detected():
    res = solve_lp([-1.0], A_ub=[[-1.0]], b_ub=[0.0])
    assert res.status == UNBOUNDED


def test_free_variable():
    # min t s.t. t >= -3 (i.e. -t <= 3), t free.
    res = solve_lp([1.0], A_ub=[[-1.0]], b_ub=[3.0], free=[True])
    assert res.status == OPTIMAL
    assert res.fun == pytest.approx(-3.0)


def test_redundant_rows_are_handled():
    res = solve_lp(
        [1.0, 1.0],
        A_eq=[[1.0, 1.0], [2.0, 2.0]],
        b_eq=[1.0, 2.0],
    )
    assert res.status == OPTIMAL
    assert res.fun == pytest.approx(1.0)


@pytest.mark.parametrize("seed", range(30))
def test_random_inequality_problems_match_scipy(seed):
    rng = np.random.default_rng(seed)
    n, m = int(rng.integers(2, 8)), int(rng.integers(2, 10))
    c = rng.normal(size=n)
    A = rng.normal(size=(m, n))
    b = rng.uniform(0.5, 2.0, size=m)  # x = 0 is feasible
    res = solve_lp(c, A_ub=A, b_ub=b)
    ref = linprog(c, A_ub=A, b_ub=b, bounds=(0, None), method="highs")
    assert res.status == (OPTIMAL if ref.status == 0 else UNBOUNDED if ref.status == 3 else res.status)
    if res.status == OPTIMAL:
        assert res.fun == pytest.approx(ref.fun, abs=1e-7)
        assert np.all(A @ res.x <= b + 1e-7)
        assert np.all(res.x >= -1e-9)


@pytest.mark.parametrize("seed", range(20))
def test_random_mixed_problems_match_scipy(seed):
    rng = np.random.default_rng(100 + seed)
    n = int(rng.integers(3, 8))
    m_ub, m_eq = int(rng.integers(1, 6)), int(rng.integers(1, 3))
    c = rng.normal(size=n)
    A_ub = rng.normal(size=(m_ub, n))
    A_eq = rng.normal(size=(m_eq, n))
    x0 = rng.uniform(0.1, 1.0, size=n)  # known interior feasible point
    b_ub = A_ub @ x0 + rng.uniform(0.1, 1.0, size=m_ub)
    b_eq = A_eq @ x0
    free = rng.uniform(size=n) < 0.3
    res = solve_lp(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, free=free)
    bounds = [(None, None) if f else (0, None) for f in free]
    ref = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if ref.status == 0:
        assert res.status == OPTIMAL
        assert res.fun == pytest.approx(ref.fun, abs=1e-6)
    elif ref.status == 3:
        assert res.status == UNBOUNDED


def test_min_max_over_simplex_two_points():
    # Points (-0.48, -0.28) and (-0.28, -0.48): the max coordinate is
    # minimized at the midpoint, value -0.38.
    scores = np.array([[-0.48, -0.28], [-0.28, -0.48]])
    value, weights = min_max_over_simplex(scores)
    assert value == pytest.approx(-0.38)
    assert np.allclose(weights, [0.5, 0.5])


def test_min_max_over_simplex_single_column():
    value, weights = min_max_over_simplex(np.array([[0.3], [-0.1]]))
    assert value == pytest.approx(0.3)
    assert weights.tolist() == [1.0]


@pytest.mark.parametrize("seed", range(10))
def test_min_max_matches_grid(seed):
    rng = np.random.default_rng(200 + seed)
    scores = rng.normal(size=(3, 4))
    value, weights = min_max_over_simplex(scores)
    assert np.max(scores @ weights) == pytest.approx(value, abs=1e-9)
    # Dense grid over the 4-simplex as the oracle.
    best = np.inf
    steps = 20
    for i in range(steps + 1):
        for j in range(steps + 1 - i):
            for k in range(steps + 1 - i - j):
                w = np.array([i, j, k, steps - i - j - k], dtype=float) / steps
                best = min(best, float(np.max(scores @ w)))
    assert value <= best + 1e-9
    assert value >= best - 0.2  # grid is coarse; LP can only be better
