"""Receiver's ex-ante best response to an experiment, by linear programming.

The receiver maximizes the worst case over priors and over members of an
ambiguous experiment. For each fixed (prior vertex, generator) pair the
payoff is linear in the strategy, and by bilinearity the inner minimum
over both hulls is attained at vertex pairs, so the program is

    max t   s.t.  t <= payoff(vertex i, generator j, tau)  for all pairs,
                  tau row-stochastic.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LPFailure
from .model import (
    FEAS_TOL,
    ExperimentLike,
    GameSpec,
    ReceiverStrategy,
    ambiguous_meu_payoff,
    as_ambiguous,
)
from .simplex import solve_lp


@dataclass(frozen=True, eq=False)
class BestResponseResult:
    """Optimal worst-case receiver value, a strategy attaining it, and the
    (prior vertex, generator) pairs tight at the optimum."""

    value: float
    optimal_strategy: ReceiverStrategy
    active_constraints: tuple[tuple[int, int], ...]


def receiver_best_response(experiment: ExperimentLike, game: GameSpec) -> BestResponseResult:
    """Solve the receiver's maxmin program over message-contingent strategies."""
    amb = as_ambiguous(experiment)
    if amb.n_states != game.n_states:
        raise LPFailure("experiment state count does not match game", status="bad_input")
    messages = amb.messages
    n_m, n_a = len(messages), game.n_actions
    n_tau = n_m * n_a

    # Constraint coefficients: payoff(i, j, tau) = sum c_ij[m, a] tau[m, a].
    coeffs = []
    for p in game.priors.vertices:
        for g in amb.generators:
            coeffs.append(((g.kernel * p[:, None]).T @ game.receiver_payoff.T).reshape(-1))
    coeffs = np.stack(coeffs)
    n_pairs = coeffs.shape[0]

    c = np.zeros(n_tau + 1)
    c[-1] = -1.0  # maximize t
    A_ub = np.hstack([-coeffs, np.ones((n_pairs, 1))])
    b_ub = np.zeros(n_pairs)
    A_eq = np.zeros((n_m, n_tau + 1))
    for m in range(n_m):
        A_eq[m, m * n_a : (m + 1) * n_a] = 1.0
    b_eq = np.ones(n_m)
    free = np.zeros(n_tau + 1, dtype=bool)
    free[-1] = True

    res = solve_lp(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, free=free)
    if not res.ok:
        raise LPFailure(
            f"best-response LP terminated with status {res.status}", status=res.status
        )
    kernel = np.clip(res.x[:n_tau].reshape(n_m, n_a), 0.0, None)
    kernel /= kernel.sum(axis=1, keepdims=True)
    tau = ReceiverStrategy(messages, game.actions, kernel)
    value = float(res.x[-1])

    pair_values = coeffs @ res.x[:n_tau]
    active = []
    idx = 0
    for i in range(game.priors.n_vertices):
        for j in range(amb.n_generators):
            if pair_values[idx] <= value + FEAS_TOL:
                active.append((i, j))
            idx += 1
    return BestResponseResult(value, tau, tuple(active))


def is_best_response(tau: ReceiverStrategy, experiment: ExperimentLike, game: GameSpec) -> bool:
    """Whether tau attains the receiver's optimal worst-case value."""
    amb = as_ambiguous(experiment)
    attained, _ = ambiguous_meu_payoff(amb, tau, game.receiver_payoff, game.priors)
    return attained >= receiver_best_response(amb, game).value - FEAS_TOL
