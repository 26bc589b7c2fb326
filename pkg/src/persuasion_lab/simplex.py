"""Self-contained dense LP kernel: two-phase primal simplex.

Solves   min c.x   s.t.  A_ub x <= b_ub,  A_eq x = b_eq,
with every variable nonnegative unless flagged free. Intended for the
small dense programs this package generates (tens of rows and columns);
no sparsity, no presolve. Bland's rule guarantees termination, and the
returned status is always one of optimal / infeasible / unbounded.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LPFailure

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_PIVOT_EPS = 1e-9
_PHASE1_TOL = 1e-8
_MAX_ITER = 20_000


@dataclass
class LPResult:
    status: str
    x: np.ndarray | None = None
    fun: float | None = None

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL


def _pivot(T: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])
    basis[row] = col


def _run_simplex(T: np.ndarray, basis: np.ndarray, cost: np.ndarray) -> str:
    """Iterate to optimality for the given cost vector (Bland's rule)."""
    for _ in range(_MAX_ITER):
        reduced = cost - cost[basis] @ T[:, :-1]
        reduced[basis] = 0.0
        entering = np.flatnonzero(reduced < -_PIVOT_EPS)
        if entering.size == 0:
            return OPTIMAL
        col = int(entering[0])
        column = T[:, col]
        rows = np.flatnonzero(column > _PIVOT_EPS)
        if rows.size == 0:
            return UNBOUNDED
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        tied = rows[ratios <= best + 1e-12]
        row = int(tied[np.argmin(basis[tied])])
        _pivot(T, basis, row, col)
    raise LPFailure("simplex iteration limit reached", status="iteration_limit")


def solve_lp(
    c,
    A_ub=None,
    b_ub=None,
    A_eq=None,
    b_eq=None,
    free=None,
) -> LPResult:
    """Minimize c.x subject to A_ub x <= b_ub and A_eq x = b_eq.

    ``free`` marks variables allowed to take any sign; all others are
    nonnegative. Free variables are split internally into differences of
    nonnegative parts.
    """
    c = np.asarray(c, dtype=float).reshape(-1)
    n = c.size
    free_mask = np.zeros(n, dtype=bool) if free is None else np.asarray(free, dtype=bool)
    if free_mask.shape != (n,):
        raise LPFailure("free mask does not match variable count", status="bad_input")

    rows_A: list[np.ndarray] = []
    rhs: list[float] = []
    n_eq = 0
    if A_eq is not None:
        A_eq = np.atleast_2d(np.asarray(A_eq, dtype=float))
        b_eq = np.asarray(b_eq, dtype=float).reshape(-1)
        n_eq = A_eq.shape[0]
        rows_A.append(A_eq)
        rhs.extend(b_eq.tolist())
    n_ub = 0
    if A_ub is not None:
        A_ub = np.atleast_2d(np.asarray(A_ub, dtype=float))
        b_ub = np.asarray(b_ub, dtype=float).reshape(-1)
        n_ub = A_ub.shape[0]
        rows_A.append(A_ub)
        rhs.extend(b_ub.tolist())
    if not rows_A:
        # Unconstrained: bounded only if no incentive to move any variable.
        if np.any(c[free_mask] != 0.0) or np.any(c < -_PIVOT_EPS):
            return LPResult(UNBOUNDED)
        return LPResult(OPTIMAL, x=np.zeros(n), fun=0.0)

    A = np.vstack(rows_A)
    b = np.asarray(rhs, dtype=float)
    m = A.shape[0]

    # Split free variables, then append slacks for the inequality block.
    neg_cols = np.flatnonzero(free_mask)
    A_ext = np.hstack([A, -A[:, neg_cols]]) if neg_cols.size else A
    c_ext = np.concatenate([c, -c[neg_cols]]) if neg_cols.size else c.copy()
    slack = np.zeros((m, n_ub))
    if n_ub:
        slack[n_eq:, :] = np.eye(n_ub)
    A_ext = np.hstack([A_ext, slack])
    c_ext = np.concatenate([c_ext, np.zeros(n_ub)])
    n_cols = A_ext.shape[1]

    flip = b < 0
    A_ext[flip] *= -1.0
    b = np.abs(b)

    # Phase 1 tableau with one artificial per row.
    T = np.hstack([A_ext, np.eye(m), b[:, None]])
    basis = np.arange(n_cols, n_cols + m)
    cost1 = np.concatenate([np.zeros(n_cols), np.ones(m)])
    status = _run_simplex(T, basis, cost1)
    if status != OPTIMAL:  # pragma: no cover - phase 1 is always bounded
        raise LPFailure("phase 1 did not terminate at an optimum", status=status)
    if float(cost1[basis] @ T[:, -1]) > _PHASE1_TOL * (1.0 + float(np.abs(b).max())):
        return LPResult(INFEASIBLE)

    # Drive remaining artificials out of the basis; drop redundant rows.
    keep_rows = np.ones(m, dtype=bool)
    for i in range(m):
        if basis[i] < n_cols:
            continue
        pivot_cols = np.flatnonzero(np.abs(T[i, :n_cols]) > _PIVOT_EPS)
        if pivot_cols.size:
            _pivot(T, basis, i, int(pivot_cols[0]))
        else:
            keep_rows[i] = False
    T = np.hstack([T[keep_rows][:, :n_cols], T[keep_rows][:, -1:]])
    basis = basis[keep_rows]

    cost2 = c_ext
    status = _run_simplex(T, basis, cost2)
    if status != OPTIMAL:
        return LPResult(status)

    x_ext = np.zeros(n_cols)
    x_ext[basis] = T[:, -1]
    x = x_ext[:n].copy()
    if neg_cols.size:
        x[neg_cols] -= x_ext[n : n + neg_cols.size]
    return LPResult(OPTIMAL, x=x, fun=float(c @ x))


def min_max_over_simplex(scores: np.ndarray) -> tuple[float, np.ndarray]:
    """Minimize the maximum of linear scores over the probability simplex.

    ``scores`` has one row per linear functional and one column per
    simplex vertex. Returns the optimal value and attaining weights.
    Used as the feasibility engine for obedience tests: the constraint
    system `scores @ w <= 0` has a convex-weight solution iff the value
    is <= 0.
    """
    scores = np.atleast_2d(np.asarray(scores, dtype=float))
    n_rows, n_vars = scores.shape
    if n_vars == 1:
        return float(scores.max()), np.ones(1)
    # Variables: (w, t); minimize t with scores @ w - t <= 0, sum w = 1.
    c = np.concatenate([np.zeros(n_vars), [1.0]])
    A_ub = np.hstack([scores, -np.ones((n_rows, 1))])
    b_ub = np.zeros(n_rows)
    A_eq = np.concatenate([np.ones(n_vars), [0.0]])[None, :]
    b_eq = np.array([1.0])
    free = np.zeros(n_vars + 1, dtype=bool)
    free[-1] = True
    res = solve_lp(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, free=free)
    if not res.ok:  # pragma: no cover - this program is always solvable
        raise LPFailure("min-max over simplex failed", status=res.status)
    w = np.clip(res.x[:n_vars], 0.0, None)
    w /= w.sum()
    return float(res.fun), w
