"""Core game objects and payoff evaluation for maxmin persuasion.

States, actions and messages are opaque labels; all numerics run on the
index order fixed at construction. A prior set is the convex hull of an
explicit vertex list, and an ambiguous experiment is the convex hull of a
finite generator list, so every minimization of a linear or bilinear
payoff functional is exact vertex enumeration. Objects are immutable
after validation and all operations are pure functions, safe to call
from concurrent workers.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DimensionMismatch, InvariantViolation

# Tolerance ladder: representation noise < tie detection < feasibility
# slack < value comparisons. Two orders of magnitude between steps.
ROW_TOL = 1e-12
TIE_TOL = 1e-10
FEAS_TOL = 1e-8
VALUE_TOL = 1e-6


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


def _check_prob_rows(kernel: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(kernel)):
        raise InvariantViolation(f"{what}: non-finite entries")
    if np.any(kernel < -ROW_TOL) or np.any(kernel > 1.0 + ROW_TOL):
        raise InvariantViolation(f"{what}: entries outside [0, 1]")
    bad = np.abs(kernel.sum(axis=1) - 1.0) > 1e-9
    if np.any(bad):
        raise InvariantViolation(
            f"{what}: row {int(np.flatnonzero(bad)[0])} does not sum to 1"
        )


def as_prior_vector(p: Sequence[float] | np.ndarray, n_states: int) -> np.ndarray:
    """Validate and return a single prior as a float vector on the simplex."""
    v = np.asarray(p, dtype=float).reshape(-1)
    if v.shape != (n_states,):
        raise DimensionMismatch(f"prior has {v.size} entries, expected {n_states}")
    if np.any(v < -1e-9) or abs(float(v.sum()) - 1.0) > 1e-9:
        raise InvariantViolation("prior is not a probability vector")
    return v


@dataclass(frozen=True, eq=False)
class PriorSet:
    """Convex set of priors given by its vertex list (V-representation)."""

    vertices: np.ndarray  # (n_vertices, n_states), rows on the simplex

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if v.size == 0:
            raise InvariantViolation("PriorSet: empty vertex list")
        _check_prob_rows(v, "PriorSet vertices")
        object.__setattr__(self, "vertices", _frozen(v))

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_states(self) -> int:
        return self.vertices.shape[1]

    def interval(self) -> tuple[float, float]:
        """(p_lo, p_hi): min/max probability of the first state.

        For two states the hull is exactly this interval.
        """
        first = self.vertices[:, 0]
        return float(first.min()), float(first.max())

    @property
    def is_singleton(self) -> bool:
        lo, hi = self.interval()
        if self.n_states == 2:
            return hi - lo <= TIE_TOL
        return bool(
            np.all(np.ptp(self.vertices, axis=0) <= TIE_TOL)
        )


@dataclass(frozen=True, eq=False)
class GameSpec:
    """A finite persuasion game: labels, both payoff matrices, prior set.

    Payoff matrices are indexed (action, state).
    """

    states: tuple[str, ...]
    actions: tuple[str, ...]
    sender_payoff: np.ndarray
    receiver_payoff: np.ndarray
    priors: PriorSet

    def __post_init__(self):
        states = tuple(str(s) for s in self.states)
        actions = tuple(str(a) for a in self.actions)
        if len(states) < 2 or len(set(states)) != len(states):
            raise InvariantViolation("GameSpec: need at least 2 distinct states")
        if len(actions) < 2 or len(set(actions)) != len(actions):
            raise InvariantViolation("GameSpec: need at least 2 distinct actions")
        shape = (len(actions), len(states))
        us = np.asarray(self.sender_payoff, dtype=float)
        ur = np.asarray(self.receiver_payoff, dtype=float)
        for name, m in (("sender_payoff", us), ("receiver_payoff", ur)):
            if m.shape != shape:
                raise DimensionMismatch(f"GameSpec: {name} has shape {m.shape}, expected {shape}")
            if not np.all(np.isfinite(m)):
                raise InvariantViolation(f"GameSpec: {name} has non-finite entries")
        if self.priors.n_states != len(states):
            raise DimensionMismatch("GameSpec: prior vertices disagree with state count")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "actions", actions)
        object.__setattr__(self, "sender_payoff", _frozen(us))
        object.__setattr__(self, "receiver_payoff", _frozen(ur))

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    @property
    def is_binary(self) -> bool:
        return self.n_states == 2 and self.n_actions == 2

    def obedient_strategy(self) -> "ReceiverStrategy":
        return ReceiverStrategy.obedient(self.actions)


@dataclass(frozen=True, eq=False)
class StatisticalExperiment:
    """Row-stochastic kernel from states to a finite message set."""

    messages: tuple[str, ...]
    kernel: np.ndarray  # (n_states, n_messages)

    def __post_init__(self):
        messages = tuple(str(m) for m in self.messages)
        k = np.atleast_2d(np.asarray(self.kernel, dtype=float))
        if k.shape[1] != len(messages):
            raise DimensionMismatch(
                f"experiment kernel has {k.shape[1]} columns for {len(messages)} messages"
            )
        _check_prob_rows(k, "experiment kernel")
        object.__setattr__(self, "messages", messages)
        object.__setattr__(self, "kernel", _frozen(k))

    @property
    def n_states(self) -> int:
        return self.kernel.shape[0]

    @property
    def n_messages(self) -> int:
        return self.kernel.shape[1]

    def is_canonical_for(self, game: GameSpec) -> bool:
        """Canonical means the messages are exactly the game's actions."""
        return self.messages == game.actions and self.n_states == game.n_states


@dataclass(frozen=True, eq=False)
class AmbiguousExperiment:
    """Finitely generated ambiguous experiment: the hull of its generators."""

    generators: tuple[StatisticalExperiment, ...]

    def __post_init__(self):
        gens = tuple(self.generators)
        if not gens:
            raise InvariantViolation("AmbiguousExperiment: no generators")
        msgs = gens[0].messages
        n_states = gens[0].n_states
        for g in gens[1:]:
            if g.messages != msgs or g.n_states != n_states:
                raise DimensionMismatch(
                    "AmbiguousExperiment: generators must share states and messages"
                )
        # Drop duplicates (within representation tolerance), keeping first.
        kept: list[StatisticalExperiment] = []
        for g in gens:
            if not any(np.max(np.abs(g.kernel - h.kernel)) <= ROW_TOL for h in kept):
                kept.append(g)
        object.__setattr__(self, "generators", tuple(kept))

    @property
    def messages(self) -> tuple[str, ...]:
        return self.generators[0].messages

    @property
    def n_states(self) -> int:
        return self.generators[0].n_states

    @property
    def n_generators(self) -> int:
        return len(self.generators)

    def is_canonical_for(self, game: GameSpec) -> bool:
        return self.generators[0].is_canonical_for(game)

    def mixture(self, weights: Sequence[float]) -> StatisticalExperiment:
        """Member of the hull with the given convex weights on generators."""
        w = np.asarray(weights, dtype=float)
        if w.shape != (self.n_generators,):
            raise DimensionMismatch("mixture weights do not match generator count")
        if np.any(w < -1e-9) or abs(float(w.sum()) - 1.0) > 1e-9:
            raise InvariantViolation("mixture weights must be convex")
        kernel = np.tensordot(w, np.stack([g.kernel for g in self.generators]), axes=1)
        return StatisticalExperiment(self.messages, kernel)


ExperimentLike = Union[StatisticalExperiment, AmbiguousExperiment]


def as_ambiguous(experiment: ExperimentLike) -> AmbiguousExperiment:
    if isinstance(experiment, AmbiguousExperiment):
        return experiment
    return AmbiguousExperiment((experiment,))


@dataclass(frozen=True, eq=False)
class ReceiverStrategy:
    """Row-stochastic kernel from messages to actions."""

    messages: tuple[str, ...]
    actions: tuple[str, ...]
    kernel: np.ndarray  # (n_messages, n_actions)

    def __post_init__(self):
        messages = tuple(str(m) for m in self.messages)
        actions = tuple(str(a) for a in self.actions)
        k = np.atleast_2d(np.asarray(self.kernel, dtype=float))
        if k.shape != (len(messages), len(actions)):
            raise DimensionMismatch(
                f"strategy kernel has shape {k.shape}, expected "
                f"({len(messages)}, {len(actions)})"
            )
        _check_prob_rows(k, "strategy kernel")
        object.__setattr__(self, "messages", messages)
        object.__setattr__(self, "actions", actions)
        object.__setattr__(self, "kernel", _frozen(k))

    @classmethod
    def obedient(cls, actions: Sequence[str]) -> "ReceiverStrategy":
        """The strategy that follows every action recommendation."""
        acts = tuple(str(a) for a in actions)
        return cls(acts, acts, np.eye(len(acts)))

    @property
    def n_actions(self) -> int:
        return self.kernel.shape[1]


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Probability mass over state/action pairs."""

    states: tuple[str, ...]
    actions: tuple[str, ...]
    mass: np.ndarray  # (n_states, n_actions)

    def __post_init__(self):
        states = tuple(str(s) for s in self.states)
        actions = tuple(str(a) for a in self.actions)
        m = np.atleast_2d(np.asarray(self.mass, dtype=float))
        if m.shape != (len(states), len(actions)):
            raise DimensionMismatch(
                f"joint mass has shape {m.shape}, expected ({len(states)}, {len(actions)})"
            )
        if not np.all(np.isfinite(m)) or np.any(m < -1e-10):
            raise InvariantViolation("joint mass must be nonnegative")
        if abs(float(m.sum()) - 1.0) > 1e-10:
            raise InvariantViolation("joint mass must sum to 1")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "actions", actions)
        object.__setattr__(self, "mass", _frozen(m))

    def action_slice(self, action_index: int) -> np.ndarray:
        """Vector over states carrying the mass recommended this action."""
        return self.mass[:, action_index]

    @property
    def state_marginal(self) -> np.ndarray:
        return self.mass.sum(axis=1)


def _check_payoff(payoff, n_actions: int, n_states: int) -> np.ndarray:
    u = np.asarray(payoff, dtype=float)
    if u.shape != (n_actions, n_states):
        raise DimensionMismatch(
            f"payoff matrix has shape {u.shape}, expected ({n_actions}, {n_states})"
        )
    return u


def _state_values(sigma: StatisticalExperiment, tau: ReceiverStrategy, payoff) -> np.ndarray:
    """Per-state expected payoff under (sigma, tau): the inner double sum."""
    if tau.messages != sigma.messages:
        raise DimensionMismatch("strategy messages do not match experiment messages")
    u = _check_payoff(payoff, tau.n_actions, sigma.n_states)
    response = sigma.kernel @ tau.kernel  # (state, action) choice probabilities
    return (response * u.T).sum(axis=1)


def expected_payoff(p, sigma: StatisticalExperiment, tau: ReceiverStrategy, payoff) -> float:
    """Expected payoff sum over states, messages and actions of
    p(state) * sigma(message|state) * tau(action|message) * u(action, state)."""
    vals = _state_values(sigma, tau, payoff)
    pv = as_prior_vector(p, sigma.n_states)
    return float(pv @ vals)


def meu_payoff(
    sigma: StatisticalExperiment,
    tau: ReceiverStrategy,
    payoff,
    priors: PriorSet,
) -> tuple[float, tuple[int, ...]]:
    """Worst-case expected payoff over the prior set.

    The objective is linear in the prior, so the minimum over the hull is
    the minimum over vertices. Returns the value and every vertex index
    attaining it within the tie tolerance.
    """
    if priors.n_states != sigma.n_states:
        raise DimensionMismatch("prior set does not match experiment state count")
    vals = priors.vertices @ _state_values(sigma, tau, payoff)
    lo = float(vals.min())
    ties = tuple(int(i) for i in np.flatnonzero(vals <= lo + TIE_TOL))
    return lo, ties


def ambiguous_meu_payoff(
    experiment: ExperimentLike,
    tau: ReceiverStrategy,
    payoff,
    priors: PriorSet,
) -> tuple[float, tuple[tuple[int, int], ...]]:
    """Worst case over priors and over the members of an ambiguous experiment.

    The payoff is bilinear in (prior, experiment), so the joint minimum
    over both hulls is attained at a (prior vertex, generator) pair.
    Returns the value and all attaining pairs.
    """
    amb = as_ambiguous(experiment)
    if priors.n_states != amb.n_states:
        raise DimensionMismatch("prior set does not match experiment state count")
    per_gen = np.stack([_state_values(g, tau, payoff) for g in amb.generators])
    table = priors.vertices @ per_gen.T  # (vertex, generator)
    lo = float(table.min())
    pairs = tuple(
        (int(i), int(j)) for i, j in np.argwhere(table <= lo + TIE_TOL)
    )
    return lo, pairs


def induced_joint(p, sigma: StatisticalExperiment, game: GameSpec) -> JointDistribution:
    """Joint state/action distribution p(state) * sigma(action|state).

    Requires a canonical experiment, since columns are read as actions.
    """
    if not sigma.is_canonical_for(game):
        raise DimensionMismatch(
            "induced_joint needs a canonical experiment (messages = actions); "
            "apply canonicalize first"
        )
    pv = as_prior_vector(p, game.n_states)
    return JointDistribution(game.states, game.actions, pv[:, None] * sigma.kernel)


def canonicalize(experiment: ExperimentLike, tau: ReceiverStrategy) -> AmbiguousExperiment:
    """Garble each generator through the receiver strategy.

    The result is canonical (messages are action recommendations) and
    payoff-equivalent: playing the original generator against tau equals
    playing the garbled one against the obedient strategy, for every
    prior and payoff matrix.
    """
    amb = as_ambiguous(experiment)
    if tau.messages != amb.messages:
        raise DimensionMismatch("strategy messages do not match experiment messages")
    gens = tuple(
        StatisticalExperiment(tau.actions, g.kernel @ tau.kernel)
        for g in amb.generators
    )
    return AmbiguousExperiment(gens)


def compose_strategy(tau: ReceiverStrategy, delta: ReceiverStrategy) -> ReceiverStrategy:
    """Post-process tau by a garbling of its actions:
    result(a|m) = sum over a' of delta(a|a') tau(a'|m)."""
    if delta.messages != tau.actions:
        raise DimensionMismatch("garbling must be defined on the strategy's actions")
    return ReceiverStrategy(tau.messages, delta.actions, tau.kernel @ delta.kernel)
