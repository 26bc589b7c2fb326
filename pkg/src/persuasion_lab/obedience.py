"""Obedience tests for joints, statistical and ambiguous experiments.

Obedience of a joint state/action distribution is a finite family of
half-space conditions: for every ordered action pair (a, b), the mass
recommended a must not prefer deviating to b. A canonical statistical
experiment is obedient iff some worst-case prior induces an obedient
joint; an ambiguous experiment is obedient iff some point of the
receiver-minimal face of its induced joints is obedient. Both
existential tests are linear feasibility problems over small polytopes
and are solved with the package's LP kernel.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .model import (
    FEAS_TOL,
    TIE_TOL,
    ExperimentLike,
    GameSpec,
    JointDistribution,
    StatisticalExperiment,
    as_ambiguous,
    induced_joint,
)
from .simplex import min_max_over_simplex


@dataclass(frozen=True, eq=False)
class DeviationVector:
    """Receiver payoff differences, per state, from swapping one action for another."""

    from_action: str
    to_action: str
    values: np.ndarray

    @classmethod
    def for_pair(cls, game: GameSpec, from_index: int, to_index: int) -> "DeviationVector":
        values = game.receiver_payoff[to_index] - game.receiver_payoff[from_index]
        return cls(game.actions[from_index], game.actions[to_index], values)


def deviation_vectors(game: GameSpec) -> list[DeviationVector]:
    """All ordered action pairs (from, to), from != to."""
    return [
        DeviationVector.for_pair(game, a, b)
        for a in range(game.n_actions)
        for b in range(game.n_actions)
        if a != b
    ]


@dataclass(frozen=True, eq=False)
class FaceWeight:
    prior_vertex: int
    generator: int
    weight: float


@dataclass(frozen=True, eq=False)
class ObedienceWitness:
    """Certificate that obedience holds.

    ``kind`` is one of joint / statistical / ambiguous. ``prior`` is the
    supporting worst-case prior for statistical witnesses. ``face_weights``
    are convex weights over (prior vertex, generator) pairs for ambiguous
    witnesses. ``slack`` holds every deviation inner product of the
    certified joint, indexed (from action, to action).
    """

    kind: str
    slack: np.ndarray
    prior: np.ndarray | None = None
    face_weights: tuple[FaceWeight, ...] | None = None

    @property
    def max_slack(self) -> float:
        off = self.slack[~np.eye(self.slack.shape[0], dtype=bool)]
        return float(off.max()) if off.size else 0.0


@dataclass(frozen=True, eq=False)
class WorstPriorFace:
    """Prior vertices minimizing the receiver's payoff under obedience."""

    vertex_indices: tuple[int, ...]
    value: float


@dataclass(frozen=True, eq=False)
class KStarFace:
    """Receiver-minimal face of the hull of induced joint distributions.

    The induction map (prior, experiment) -> joint is bilinear, so the
    hull of all induced joints equals the hull of the joints induced by
    (prior vertex, generator) pairs, and the minimizing face is spanned
    by the pairs listed here. A listed pair minimizes the joint problem;
    for degenerate faces its prior need not be worst-case for its own
    generator in isolation.
    """

    minimizing_pairs: tuple[tuple[int, int], ...]
    value: float


def slack_matrix(joint: JointDistribution, game: GameSpec) -> np.ndarray:
    """Deviation inner products for every ordered action pair.

    Entry (a, b) is the payoff change from playing b on the mass that was
    recommended a; the diagonal is zero by construction.
    """
    if joint.states != game.states or joint.actions != game.actions:
        raise DimensionMismatch("joint labels do not match the game")
    cross = joint.mass.T @ game.receiver_payoff.T  # (a, b): mass_a . payoff_b
    return cross - np.diag(cross)[:, None]


def joint_obedience(
    joint: JointDistribution, game: GameSpec, tol: float = FEAS_TOL
) -> tuple[bool, np.ndarray]:
    """Half-space test: obedient iff no deviation inner product is positive."""
    slack = slack_matrix(joint, game)
    off = slack[~np.eye(game.n_actions, dtype=bool)]
    return bool(np.all(off <= tol)), slack


def worst_case_priors(
    sigma: StatisticalExperiment, game: GameSpec, tol: float = TIE_TOL
) -> WorstPriorFace:
    """Prior vertices minimizing the receiver's obedient payoff, ties included."""
    if not sigma.is_canonical_for(game):
        raise DimensionMismatch("worst_case_priors needs a canonical experiment")
    per_state = (sigma.kernel * game.receiver_payoff.T).sum(axis=1)
    vals = game.priors.vertices @ per_state
    lo = float(vals.min())
    idx = tuple(int(i) for i in np.flatnonzero(vals <= lo + tol))
    return WorstPriorFace(idx, lo)


def _pair_scores(
    game: GameSpec, joints: list[np.ndarray]
) -> np.ndarray:
    """Deviation inner products of each candidate joint, one column per joint."""
    devs = deviation_vectors(game)
    action_index = {a: i for i, a in enumerate(game.actions)}
    rows = []
    for d in devs:
        a = action_index[d.from_action]
        rows.append([float(j[:, a] @ d.values) for j in joints])
    return np.asarray(rows, dtype=float)


def statistical_obedience(
    sigma: StatisticalExperiment, game: GameSpec
) -> ObedienceWitness | None:
    """Search the worst-case prior face for a prior inducing an obedient joint.

    The deviation constraints are linear in the prior, so this is linear
    feasibility over the face hull. Returns the witness, or None.
    """
    face = worst_case_priors(sigma, game)
    verts = game.priors.vertices[list(face.vertex_indices)]
    if len(face.vertex_indices) == 1:
        p = verts[0]
        ok, slack = joint_obedience(induced_joint(p, sigma, game), game)
        return ObedienceWitness("statistical", slack, prior=p) if ok else None
    joints = [v[:, None] * sigma.kernel for v in verts]
    value, weights = min_max_over_simplex(_pair_scores(game, joints))
    if value > FEAS_TOL:
        return None
    p = weights @ verts
    ok, slack = joint_obedience(induced_joint(p, sigma, game), game)
    if not ok:  # pragma: no cover - LP feasibility already certifies this
        return None
    return ObedienceWitness("statistical", slack, prior=p)


def k_star(experiment: ExperimentLike, game: GameSpec) -> KStarFace:
    """All (prior vertex, generator) pairs whose joint attains the minimal
    receiver payoff under obedience, with the attained value."""
    amb = as_ambiguous(experiment)
    if not amb.is_canonical_for(game):
        raise DimensionMismatch("k_star needs canonical generators")
    per_gen = np.stack(
        [(g.kernel * game.receiver_payoff.T).sum(axis=1) for g in amb.generators]
    )
    table = game.priors.vertices @ per_gen.T  # (vertex, generator)
    lo = float(table.min())
    pairs = tuple((int(i), int(j)) for i, j in np.argwhere(table <= lo + TIE_TOL))
    return KStarFace(pairs, lo)


def ambiguous_obedience(
    experiment: ExperimentLike, game: GameSpec
) -> ObedienceWitness | None:
    """Search the receiver-minimal face for an obedient mixture of joints.

    Solves min-max deviation slack over convex weights on the face's
    (prior vertex, generator) pairs; a witness exists iff the optimum is
    within feasibility tolerance.
    """
    amb = as_ambiguous(experiment)
    face = k_star(amb, game)
    joints = [
        game.priors.vertices[i][:, None] * amb.generators[j].kernel
        for i, j in face.minimizing_pairs
    ]
    value, weights = min_max_over_simplex(_pair_scores(game, joints))
    if value > FEAS_TOL:
        return None
    mix = np.tensordot(weights, np.stack(joints), axes=1)
    joint = JointDistribution(game.states, game.actions, mix)
    ok, slack = joint_obedience(joint, game)
    if not ok:  # pragma: no cover - LP feasibility already certifies this
        return None
    face_weights = tuple(
        FaceWeight(i, j, float(w))
        for (i, j), w in zip(face.minimizing_pairs, weights)
        if w > 0.0
    )
    return ObedienceWitness("ambiguous", slack, face_weights=face_weights)


def witness_joint(
    witness: ObedienceWitness, experiment: ExperimentLike, game: GameSpec
) -> JointDistribution:
    """Rebuild the certified joint distribution from a witness."""
    amb = as_ambiguous(experiment)
    if witness.kind == "statistical":
        if witness.prior is None:
            raise DimensionMismatch("statistical witness lacks a prior")
        return induced_joint(witness.prior, amb.generators[0], game)
    if not witness.face_weights:
        raise DimensionMismatch("ambiguous witness lacks face weights")
    mass = np.zeros((game.n_states, game.n_actions))
    for fw in witness.face_weights:
        p = game.priors.vertices[fw.prior_vertex]
        mass += fw.weight * (p[:, None] * amb.generators[fw.generator].kernel)
    return JointDistribution(game.states, game.actions, mass)
