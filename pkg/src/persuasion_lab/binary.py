"""Two-state, two-action machinery: normalization, deviation functionals,
the receiver payoff line, face splitting, and the no-gain construction.

After orienting and rescaling the receiver payoffs so that deviating from
the first action gains 1 in the first state and loses k > 0 in the second,
obedience of an experiment (x, y) = (prob of recommending the first action
in each state) at prior p reduces to a single scalar condition on the
deviation functional phi. The receiver's obedient payoff is affine in p,
whose slope sign pins down the worst-case prior; mixing a slope-positive
and a slope-negative member of the receiver-minimal face to slope zero
yields a single obedient statistical experiment inside the hull, which is
what the construction below builds and certifies.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    InvariantViolation,
    NotObedientError,
    TheoremViolation,
)
from .model import (
    FEAS_TOL,
    TIE_TOL,
    AmbiguousExperiment,
    ExperimentLike,
    GameSpec,
    StatisticalExperiment,
    as_ambiguous,
)
from .obedience import (
    ObedienceWitness,
    ambiguous_obedience,
    k_star,
    statistical_obedience,
)
from .simplex import solve_lp

HULL_TOL = 1e-9


@dataclass(frozen=True)
class BinaryExperiment:
    """Canonical binary experiment in oriented coordinates:
    x, y = probability of recommending the first oriented action per state."""

    x: float
    y: float

    def __post_init__(self):
        for name, v in (("x", self.x), ("y", self.y)):
            if not -1e-9 <= v <= 1.0 + 1e-9:
                raise InvariantViolation(f"BinaryExperiment: {name}={v} outside [0, 1]")
        object.__setattr__(self, "x", float(min(max(self.x, 0.0), 1.0)))
        object.__setattr__(self, "y", float(min(max(self.y, 0.0), 1.0)))


@dataclass(frozen=True)
class BinaryNormalization:
    """Receiver payoff normalization for a 2x2 game.

    Actions are relabeled if needed so that deviating from the first
    (oriented) action gains in the first state and loses in the second;
    scaling by ``scale`` then makes the gain exactly 1 and the loss k.
    ``w`` holds the scaled payoffs of the first oriented action in each
    state. When one action weakly dominates, ``degenerate`` is set and the
    rest of this module refuses the game.
    """

    k: float
    w: tuple[float, float]
    scale: float
    actions_swapped: bool
    degenerate: bool
    dominant_action: str | None = None

    def require_regular(self) -> None:
        if self.degenerate:
            raise InvariantViolation(
                "degenerate binary game (one action weakly dominates); "
                "use joint_obedience directly"
            )


def normalize(game: GameSpec) -> BinaryNormalization:
    """Orient and rescale a 2x2 game's receiver payoffs.

    Returns the degenerate flag when the deviation vector has a single
    sign, i.e. one action weakly dominates the other.
    """
    if not game.is_binary:
        raise DimensionMismatch("normalize requires a 2-state, 2-action game")
    v = game.receiver_payoff[1] - game.receiver_payoff[0]
    if v[0] >= 0 and v[1] >= 0:
        return BinaryNormalization(
            0.0, (0.0, 0.0), 1.0, False, True, dominant_action=game.actions[1]
        )
    if v[0] <= 0 and v[1] <= 0:
        return BinaryNormalization(
            0.0, (0.0, 0.0), 1.0, False, True, dominant_action=game.actions[0]
        )
    swapped = bool(v[0] < 0)  # orient so the first-state deviation gain is positive
    first = 1 if swapped else 0
    v_or = -v if swapped else v
    scale = 1.0 / float(v_or[0])
    k = -float(v_or[1]) * scale
    w_row = game.receiver_payoff[first] * scale
    return BinaryNormalization(k, (float(w_row[0]), float(w_row[1])), scale, swapped, False)


def as_binary(sigma: StatisticalExperiment, norm: BinaryNormalization, game: GameSpec) -> BinaryExperiment:
    """Oriented (x, y) coordinates of a canonical binary experiment."""
    if not sigma.is_canonical_for(game):
        raise DimensionMismatch("as_binary needs a canonical experiment")
    col = 1 if norm.actions_swapped else 0
    return BinaryExperiment(float(sigma.kernel[0, col]), float(sigma.kernel[1, col]))


def as_experiment(bx: BinaryExperiment, norm: BinaryNormalization, game: GameSpec) -> StatisticalExperiment:
    """Invert the orientation: oriented coordinates back to original labels."""
    if norm.actions_swapped:
        kernel = [[1.0 - bx.x, bx.x], [1.0 - bx.y, bx.y]]
    else:
        kernel = [[bx.x, 1.0 - bx.x], [bx.y, 1.0 - bx.y]]
    return StatisticalExperiment(game.actions, kernel)


def line_coefficients(bx: BinaryExperiment, norm: BinaryNormalization) -> tuple[float, float]:
    """(slope, intercept) of the scaled obedient receiver payoff in the prior."""
    norm.require_regular()
    w1, w2 = norm.w
    k = norm.k
    slope = w1 - w2 + (1.0 - bx.x) + k * (1.0 - bx.y)
    intercept = w2 - k * (1.0 - bx.y)
    return slope, intercept


def phi(p: float, bx: BinaryExperiment, norm: BinaryNormalization) -> tuple[float, float]:
    """Deviation functionals at prior p, in scaled units.

    phi_ab is the gain from deviating off the first oriented action;
    phi_ba differs from it by k - (1+k) p, independent of the experiment.
    """
    norm.require_regular()
    phi_ab = p * bx.x - norm.k * (1.0 - p) * bx.y
    phi_ba = phi_ab + norm.k - (1.0 + norm.k) * p
    return phi_ab, phi_ba


def obedience_threshold(p: float, norm: BinaryNormalization) -> float:
    norm.require_regular()
    return min(0.0, (1.0 + norm.k) * p - norm.k)


def binary_obedience(
    p: float, bx: BinaryExperiment, norm: BinaryNormalization, tol: float = FEAS_TOL
) -> bool:
    """Scalar obedience test at prior p, equivalent to the joint half-space
    test on the induced joint distribution."""
    phi_ab, _ = phi(p, bx, norm)
    return phi_ab <= obedience_threshold(p, norm) + tol


def split_faces(
    experiment: ExperimentLike, game: GameSpec
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Generator indices whose joint with the low (resp. high) endpoint of
    the prior interval lies on the receiver-minimal face."""
    amb = as_ambiguous(experiment)
    if not game.is_binary:
        raise DimensionMismatch("split_faces requires a binary game")
    p_lo, p_hi = game.priors.interval()
    face = k_star(amb, game)
    first = game.priors.vertices[:, 0]
    low, high = set(), set()
    for i, j in face.minimizing_pairs:
        if abs(first[i] - p_lo) <= TIE_TOL:
            low.add(j)
        if abs(first[i] - p_hi) <= TIE_TOL:
            high.add(j)
    return tuple(sorted(low)), tuple(sorted(high))


@dataclass(frozen=True)
class DecompositionWitness:
    """Everything the no-gain construction produced, in oriented coordinates.

    ``lam`` is the blend weight on ``sigma_l``; ``balanced`` records whether
    the blend reached slope zero (always true when both faces were
    available; in one-sided cases the returned experiment is simply the
    present side, obedient at its own worst-case endpoint).
    """

    sigma_l: BinaryExperiment
    sigma_u: BinaryExperiment
    alpha: float
    p_alpha: float
    lam: float
    sigma_hat: BinaryExperiment
    balanced: bool
    margin: float  # threshold minus phi at (p_alpha, sigma_hat); >= -tol

    def to_json(self) -> dict:
        return {
            "sigma_l": [self.sigma_l.x, self.sigma_l.y],
            "sigma_u": [self.sigma_u.x, self.sigma_u.y],
            "alpha": self.alpha,
            "p_alpha": self.p_alpha,
            "lambda": self.lam,
            "sigma_hat": [self.sigma_hat.x, self.sigma_hat.y],
            "balanced": self.balanced,
            "margin": self.margin,
        }


def _endpoint_weights(game: GameSpec, witness: ObedienceWitness) -> tuple[dict, dict, float]:
    """Split witness face weights into contributions at the prior interval
    endpoints.

    A weighted pair at an interior vertex is split between the endpoints
    (the induced joint is linear in the prior), so the output is exactly a
    two-endpoint decomposition. Returns (low: {gen: w}, high: {gen: w},
    total low weight).
    """
    p_lo, p_hi = game.priors.interval()
    width = p_hi - p_lo
    low: dict[int, float] = {}
    high: dict[int, float] = {}
    if not witness.face_weights:
        raise DimensionMismatch("witness carries no face weights")
    for fw in witness.face_weights:
        p = float(game.priors.vertices[fw.prior_vertex, 0])
        if width <= TIE_TOL:
            t = 1.0
        else:
            t = (p_hi - p) / width  # share assigned to the low endpoint
        if t > 0.0:
            low[fw.generator] = low.get(fw.generator, 0.0) + fw.weight * t
        if t < 1.0:
            high[fw.generator] = high.get(fw.generator, 0.0) + fw.weight * (1.0 - t)
    return low, high, float(sum(low.values()))


def _aggregate(amb: AmbiguousExperiment, weights: dict[int, float], norm, game) -> BinaryExperiment:
    total = sum(weights.values())
    kernel = sum(w * amb.generators[j].kernel for j, w in weights.items()) / total
    return as_binary(StatisticalExperiment(amb.messages, kernel), norm, game)


def decompose_obedient_pi(
    witness: ObedienceWitness, experiment: ExperimentLike, game: GameSpec
) -> tuple[BinaryExperiment, BinaryExperiment, float]:
    """Represent a certified obedient joint as a two-point mixture.

    Aggregates the witness's face weights by prior endpoint: the result is
    (low-side experiment, high-side experiment, weight on the low side),
    and the certified joint equals that mixture of endpoint joints exactly.
    When all weight sits on one endpoint the absent side is returned equal
    to the present side's aggregate.
    """
    amb = as_ambiguous(experiment)
    norm = normalize(game)
    norm.require_regular()
    if witness.kind != "ambiguous":
        raise DimensionMismatch("decompose_obedient_pi expects an ambiguous witness")
    low, high, alpha = _endpoint_weights(game, witness)
    if not low and not high:
        raise DimensionMismatch("witness carries no usable weight")
    sigma_l = _aggregate(amb, low, norm, game) if low else None
    sigma_u = _aggregate(amb, high, norm, game) if high else None
    if sigma_l is None:
        sigma_l = sigma_u
    if sigma_u is None:
        sigma_u = sigma_l
    return sigma_l, sigma_u, alpha


def hull_distance(bx: BinaryExperiment, points: np.ndarray) -> float:
    """Chebyshev distance from (x, y) to the convex hull of the given points."""
    target = np.array([bx.x, bx.y])
    n = points.shape[0]
    # Variables (weights, t): minimize t with |points.T w - target| <= t.
    c = np.concatenate([np.zeros(n), [1.0]])
    A_ub = np.vstack([
        np.hstack([points.T, -np.ones((2, 1))]),
        np.hstack([-points.T, -np.ones((2, 1))]),
    ])
    b_ub = np.concatenate([target, -target])
    A_eq = np.concatenate([np.ones(n), [0.0]])[None, :]
    res = solve_lp(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0])
    if not res.ok:  # pragma: no cover
        raise TheoremViolation("hull membership LP failed", {"status": res.status})
    return float(res.fun)


def construct_sigma_hat(experiment: ExperimentLike, game: GameSpec) -> DecompositionWitness:
    """Build and certify an obedient statistical member of an obedient
    ambiguous experiment.

    Decomposes the obedience witness into endpoint aggregates, asserts the
    payoff-line slope signs those faces force, blends to slope zero when
    both sides are available (so every prior in the interval is worst-case),
    and certifies the blend obedient at the mixture prior. If a face is
    empty and the witness is one-sided, the present side is itself obedient
    at its endpoint and is returned directly. Any failed certification
    raises TheoremViolation with full diagnostics; obedience of the input
    is a precondition.
    """
    amb = as_ambiguous(experiment)
    norm = normalize(game)
    norm.require_regular()
    witness = ambiguous_obedience(amb, game)
    if witness is None:
        raise NotObedientError("construct_sigma_hat requires an obedient ambiguous experiment")

    p_lo, p_hi = game.priors.interval()
    sigma_l, sigma_u, alpha = decompose_obedient_pi(witness, amb, game)
    low_face, high_face = split_faces(amb, game)

    def fail(reason: str, **extra):
        diag = {
            "reason": reason,
            "game": {
                "receiver_payoff": game.receiver_payoff.tolist(),
                "sender_payoff": game.sender_payoff.tolist(),
                "prior_vertices": game.priors.vertices.tolist(),
            },
            "generators": [g.kernel.tolist() for g in amb.generators],
            "alpha": alpha,
        }
        diag.update(extra)
        raise TheoremViolation(f"no-gain construction failed: {reason}", diag)

    singleton = p_hi - p_lo <= TIE_TOL
    if singleton:
        # Every prior in the (collapsed) interval is worst-case, so the full
        # witness aggregate is itself an obedient member.
        lam = alpha
        sigma_hat = BinaryExperiment(
            alpha * sigma_l.x + (1.0 - alpha) * sigma_u.x,
            alpha * sigma_l.y + (1.0 - alpha) * sigma_u.y,
        )
        p_alpha = p_lo
        balanced = abs(line_coefficients(sigma_hat, norm)[0]) <= TIE_TOL
    else:
        # Re-select a side whose witness weight vanished from its face, so
        # the slope-zero blend stays available whenever the face is nonempty.
        if alpha <= 1e-12 and low_face:
            sigma_l = _aggregate(amb, {j: 1.0 for j in low_face}, norm, game)
        if alpha >= 1.0 - 1e-12 and high_face:
            sigma_u = _aggregate(amb, {j: 1.0 for j in high_face}, norm, game)
        have_low = alpha > 1e-12 or bool(low_face)
        have_high = alpha < 1.0 - 1e-12 or bool(high_face)
        if have_low and have_high:
            m_l = line_coefficients(sigma_l, norm)[0]
            m_u = line_coefficients(sigma_u, norm)[0]
            if m_l < -FEAS_TOL:
                fail("low-side slope must be nonnegative", m_l=m_l)
            if m_u > FEAS_TOL:
                fail("high-side slope must be nonpositive", m_u=m_u)
            lam = 1.0 if m_l - m_u <= TIE_TOL else -m_u / (m_l - m_u)
            lam = min(max(lam, 0.0), 1.0)
            sigma_hat = BinaryExperiment(
                lam * sigma_l.x + (1.0 - lam) * sigma_u.x,
                lam * sigma_l.y + (1.0 - lam) * sigma_u.y,
            )
            p_alpha = alpha * p_lo + (1.0 - alpha) * p_hi
            balanced = True
        elif have_low:
            lam, sigma_hat, p_alpha = 1.0, sigma_l, p_lo
            balanced = abs(line_coefficients(sigma_hat, norm)[0]) <= TIE_TOL
        else:
            lam, sigma_hat, p_alpha = 0.0, sigma_u, p_hi
            balanced = abs(line_coefficients(sigma_hat, norm)[0]) <= TIE_TOL

    phi_ab, _ = phi(p_alpha, sigma_hat, norm)
    margin = obedience_threshold(p_alpha, norm) - phi_ab
    if margin < -FEAS_TOL:
        fail(
            "blended experiment is not obedient at the mixture prior",
            sigma_hat=[sigma_hat.x, sigma_hat.y],
            p_alpha=p_alpha,
            margin=margin,
        )
    points = np.array(
        [[b.x, b.y] for b in (as_binary(g, norm, game) for g in amb.generators)]
    )
    gap = hull_distance(sigma_hat, points)
    if gap > HULL_TOL:
        fail("blended experiment left the generator hull", hull_gap=gap)
    if statistical_obedience(as_experiment(sigma_hat, norm, game), game) is None:
        fail(
            "blended experiment failed the statistical obedience test",
            sigma_hat=[sigma_hat.x, sigma_hat.y],
        )
    return DecompositionWitness(
        sigma_l, sigma_u, alpha, p_alpha, lam, sigma_hat, balanced, float(margin)
    )
