"""Sender-side optimization: optimal statistical value, ambiguous values,
obedient-experiment sampling, and the gain search.

For binary games the optimal obedient statistical experiment is found by
a vectorized grid sweep over (x, y) in the unit square, two rounds of
ten-fold local refinement, and an exact candidate stage. The feasible set
is a union of polygons cut by the worst-case-prior cases, and the sender
objective is a minimum of two affine functions, so the true optimum sits
on a polygon vertex or on the objective's ridge; those points are
enumerated in closed form and appended to the candidate pool, which makes
the returned value exact up to floating arithmetic while keeping the grid
value as a lower bound. Larger games fall back to a budgeted kernel
enumeration and are flagged approximate.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable

import numpy as np

from .errors import InvariantViolation, PersuasionLabError
from .model import (
    FEAS_TOL,
    TIE_TOL,
    AmbiguousExperiment,
    ExperimentLike,
    GameSpec,
    StatisticalExperiment,
    ambiguous_meu_payoff,
    as_ambiguous,
    meu_payoff,
)
from .obedience import ObedienceWitness, ambiguous_obedience, statistical_obedience


@dataclass(frozen=True, eq=False)
class SenderSolution:
    """Best obedient statistical experiment found, with its certificate."""

    value: float
    experiment: StatisticalExperiment
    obedience_witness: ObedienceWitness
    method: str  # grid | refined-grid | enumerated
    exact: bool  # False on the approximate non-binary path


@dataclass(frozen=True)
class GainTrial:
    trial: int
    seed: int
    obedient: bool
    sender_value: float | None
    lemma2_candidate: bool


@dataclass(frozen=True)
class GainReport:
    """Outcome of a gain search: the statistical benchmark, the best
    obedient ambiguous value found, and the candidate count for the
    obedient-without-obedient-member probe."""

    v_stat: float
    best_ambiguous: float | None
    gap: float | None
    trials: int
    obedient_count: int
    lemma2_candidates: int
    seed: int

    def to_json(self) -> dict:
        return {
            "v_stat": self.v_stat,
            "best_ambiguous": self.best_ambiguous,
            "gap": self.gap,
            "trials": self.trials,
            "obedient_count": self.obedient_count,
            "lemma2_candidates": self.lemma2_candidates,
            "seed": self.seed,
        }


def trial_seed(seed: int, trial: int) -> int:
    """Stable per-trial seed so campaigns are resumable and order-free."""
    digest = hashlib.blake2b(f"{seed}:{trial}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


# ---------------------------------------------------------------------------
# Binary statistical optimum


def _binary_data(game: GameSpec):
    ur, us = game.receiver_payoff, game.sender_payoff
    v = ur[1] - ur[0]  # deviation gains per state, first -> second action
    p_lo, p_hi = game.priors.interval()
    return ur, us, v, p_lo, p_hi


def _receiver_slope(game: GameSpec, X, Y):
    ur = game.receiver_payoff
    r1 = ur[1, 0] + X * (ur[0, 0] - ur[1, 0])
    r2 = ur[1, 1] + Y * (ur[0, 1] - ur[1, 1])
    return r1 - r2


def _slacks_at(game: GameSpec, p: float, X, Y):
    v = game.receiver_payoff[1] - game.receiver_payoff[0]
    s_ab = p * X * v[0] + (1.0 - p) * Y * v[1]
    s_ba = -(p * (1.0 - X) * v[0] + (1.0 - p) * (1.0 - Y) * v[1])
    return np.maximum(s_ab, s_ba)


def _crossing_prior(game: GameSpec) -> float | None:
    """Prior where the two deviation slacks coincide (experiment-independent)."""
    v = game.receiver_payoff[1] - game.receiver_payoff[0]
    denom = v[0] - v[1]
    if abs(denom) <= 1e-15:
        return None
    p = -v[1] / denom
    return float(p) if 0.0 < p < 1.0 else None


def _feasible_mask(game: GameSpec, X, Y):
    """Obedience of the grid experiments at some worst-case prior."""
    _, _, _, p_lo, p_hi = _binary_data(game)
    width = p_hi - p_lo
    slope = _receiver_slope(game, X, Y)
    band = TIE_TOL / width if width > TIE_TOL else np.inf
    low_in_face = slope >= -band
    high_in_face = slope <= band
    ok = np.zeros(np.shape(X), dtype=bool)
    ok |= low_in_face & (_slacks_at(game, p_lo, X, Y) <= FEAS_TOL)
    ok |= high_in_face & (_slacks_at(game, p_hi, X, Y) <= FEAS_TOL)
    p_c = _crossing_prior(game)
    if p_c is not None and p_lo < p_c < p_hi:
        flat = low_in_face & high_in_face
        ok |= flat & (_slacks_at(game, p_c, X, Y) <= FEAS_TOL)
    return ok


def _sender_endpoint_values(game: GameSpec, p: float, X, Y):
    us = game.sender_payoff
    s1 = us[1, 0] + X * (us[0, 0] - us[1, 0])
    s2 = us[1, 1] + Y * (us[0, 1] - us[1, 1])
    return p * s1 + (1.0 - p) * s2


def _sender_objective(game: GameSpec, X, Y):
    _, _, _, p_lo, p_hi = _binary_data(game)
    return np.minimum(
        _sender_endpoint_values(game, p_lo, X, Y),
        _sender_endpoint_values(game, p_hi, X, Y),
    )


def _line_from_probe(fn) -> tuple[float, float, float]:
    """(coef_x, coef_y, const) of an affine function of (x, y), by probing."""
    at = lambda x, y: float(fn(np.array(x), np.array(y)))
    const = at(0.0, 0.0)
    return at(1.0, 0.0) - const, at(0.0, 1.0) - const, const


def _exact_candidates(game: GameSpec) -> np.ndarray:
    """Closed-form candidate optima: vertices of each feasible polygon plus
    intersections with the sender objective's ridge."""
    _, _, _, p_lo, p_hi = _binary_data(game)
    box = [
        (1.0, 0.0, 0.0),   # x >= 0  encoded as  cx*x + cy*y + c >= 0
        (-1.0, 0.0, 1.0),  # x <= 1
        (0.0, 1.0, 0.0),
        (0.0, -1.0, 1.0),
    ]

    def slack_lines(p: float) -> list[tuple[float, float, float]]:
        v = game.receiver_payoff[1] - game.receiver_payoff[0]
        # s_ab <= 0 and s_ba <= 0, each written as an affine >= 0 form.
        ab = (-(p * v[0]), -((1.0 - p) * v[1]), 0.0)
        ba = (-(p * v[0]), -((1.0 - p) * v[1]), p * v[0] + (1.0 - p) * v[1])
        return [ab, ba]

    slope_line = _line_from_probe(lambda X, Y: _receiver_slope(game, X, Y))
    ridge = _line_from_probe(
        lambda X, Y: _sender_endpoint_values(game, p_lo, X, Y)
        - _sender_endpoint_values(game, p_hi, X, Y)
    )

    regions: list[list[tuple[float, float, float]]] = []
    if p_hi - p_lo <= TIE_TOL:
        regions.append(box + slack_lines(p_lo))
    else:
        cx, cy, c0 = slope_line
        regions.append(box + slack_lines(p_lo) + [(cx, cy, c0)])
        regions.append(box + slack_lines(p_hi) + [(-cx, -cy, -c0)])
        p_c = _crossing_prior(game)
        if p_c is not None and p_lo < p_c < p_hi:
            regions.append(
                box + slack_lines(p_c) + [(cx, cy, c0), (-cx, -cy, -c0)]
            )

    points: list[tuple[float, float]] = []
    for lines in regions:
        pool = lines + [ridge]
        for (a1, b1, c1), (a2, b2, c2) in combinations(pool, 2):
            det = a1 * b2 - a2 * b1
            if abs(det) <= 1e-14:
                continue
            x = (-c1 * b2 + c2 * b1) / det
            y = (-a1 * c2 + a2 * c1) / det
            if not (-1e-9 <= x <= 1.0 + 1e-9 and -1e-9 <= y <= 1.0 + 1e-9):
                continue
            if all(a * x + b * y + c >= -1e-9 for a, b, c in lines):
                points.append((min(max(x, 0.0), 1.0), min(max(y, 0.0), 1.0)))
    if not points:
        return np.empty((0, 2))
    return np.unique(np.round(np.asarray(points), 15), axis=0)


def _binary_optimal(game: GameSpec, resolution: float, refine_rounds: int, exact_stage: bool):
    steps = max(2, int(round(1.0 / resolution)) + 1)
    axis = np.linspace(0.0, 1.0, steps)
    X, Y = np.meshgrid(axis, axis, indexing="ij")
    pool_x, pool_y, pool_src = [X.ravel()], [Y.ravel()], ["grid"]

    def best_of(xs, ys):
        mask = _feasible_mask(game, xs, ys)
        if not np.any(mask):
            return None
        vals = _sender_objective(game, xs, ys)
        vals = np.where(mask, vals, -np.inf)
        i = int(np.argmax(vals))
        return float(vals[i]), float(xs[i]), float(ys[i])

    incumbent = best_of(X.ravel(), Y.ravel())
    if incumbent is None:  # fully revealing is always obedient
        raise PersuasionLabError("internal error: no feasible experiment on the grid")

    method = "grid"
    step = 1.0 / (steps - 1)
    for _ in range(max(0, refine_rounds)):
        _, cx, cy = incumbent
        lo_x, hi_x = max(0.0, cx - step), min(1.0, cx + step)
        lo_y, hi_y = max(0.0, cy - step), min(1.0, cy + step)
        step /= 10.0
        gx = np.arange(lo_x, hi_x + step / 2, step)
        gy = np.arange(lo_y, hi_y + step / 2, step)
        RX, RY = np.meshgrid(gx, gy, indexing="ij")
        cand = best_of(np.append(RX.ravel(), cx), np.append(RY.ravel(), cy))
        if cand is not None and cand[0] > incumbent[0]:
            incumbent = cand
        method = "refined-grid"

    if exact_stage:
        pts = _exact_candidates(game)
        if pts.size:
            cand = best_of(pts[:, 0], pts[:, 1])
            if cand is not None and cand[0] > incumbent[0] + 1e-15:
                incumbent = cand
                method = "enumerated"
    return incumbent, method


def optimal_statistical_value(
    game: GameSpec,
    resolution: float = 1e-3,
    refine_rounds: int = 2,
    exact_stage: bool = True,
    candidate_budget: int = 20_000,
) -> SenderSolution:
    """Maximize the sender's worst-case payoff over obedient canonical
    statistical experiments.

    Binary games run the grid / refinement / exact-candidate pipeline and
    the result is exact; other games enumerate a budgeted kernel grid and
    the result is a certified lower bound (``exact=False``).
    """
    if not 0.0 < resolution <= 0.5:
        raise InvariantViolation("resolution must lie in (0, 0.5]")
    tau = game.obedient_strategy()
    if game.is_binary:
        (value, x, y), method = _binary_optimal(game, resolution, refine_rounds, exact_stage)
        # Re-certify through the LP route; fall back along the grid on a
        # borderline tie (never observed, kept for robustness).
        sigma = StatisticalExperiment(game.actions, [[x, 1.0 - x], [y, 1.0 - y]])
        witness = statistical_obedience(sigma, game)
        if witness is None:
            steps = max(2, int(round(1.0 / resolution)) + 1)
            axis = np.linspace(0.0, 1.0, steps)
            X, Y = np.meshgrid(axis, axis, indexing="ij")
            mask = _feasible_mask(game, X, Y)
            vals = np.where(mask, _sender_objective(game, X, Y), -np.inf)
            order = np.argsort(vals.ravel())[::-1]
            for idx in order[: 50]:
                x, y = float(X.ravel()[idx]), float(Y.ravel()[idx])
                sigma = StatisticalExperiment(game.actions, [[x, 1.0 - x], [y, 1.0 - y]])
                witness = statistical_obedience(sigma, game)
                if witness is not None:
                    break
            if witness is None:
                raise PersuasionLabError("internal error: could not certify any candidate")
        value, _ = meu_payoff(sigma, tau, game.sender_payoff, game.priors)
        return SenderSolution(value, sigma, witness, method, exact=True)

    best: tuple[float, StatisticalExperiment, ObedienceWitness] | None = None
    for kernel in _kernel_grid(game, resolution, candidate_budget):
        sigma = StatisticalExperiment(game.actions, kernel)
        witness = statistical_obedience(sigma, game)
        if witness is None:
            continue
        value, _ = meu_payoff(sigma, tau, game.sender_payoff, game.priors)
        if best is None or value > best[0]:
            best = (value, sigma, witness)
    if best is None:  # pragma: no cover - the revealing kernel always certifies
        raise PersuasionLabError("internal error: no obedient experiment found")
    return SenderSolution(best[0], best[1], best[2], "grid", exact=False)


def _compositions(total: int, parts: int) -> Iterable[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def _kernel_grid(game: GameSpec, resolution: float, budget: int) -> Iterable[np.ndarray]:
    """Product grid over per-state rows of the action simplex, coarsened to
    fit the candidate budget; always includes the receiver-revealing kernel."""
    n_s, n_a = game.n_states, game.n_actions
    denom = max(1, int(round(1.0 / resolution)))
    while denom > 1:
        rows = sum(1 for _ in _compositions(denom, n_a))
        if rows**n_s <= budget:
            break
        denom -= 1
    rows = [np.asarray(c, dtype=float) / denom for c in _compositions(denom, n_a)]
    revealing = np.zeros((n_s, n_a))
    revealing[np.arange(n_s), np.argmax(game.receiver_payoff, axis=0)] = 1.0
    yield revealing
    index = np.zeros(n_s, dtype=int)
    while True:
        kernel = np.stack([rows[i] for i in index])
        if np.max(np.abs(kernel - revealing)) > 1e-12:
            yield kernel
        pos = n_s - 1
        while pos >= 0:
            index[pos] += 1
            if index[pos] < len(rows):
                break
            index[pos] = 0
            pos -= 1
        if pos < 0:
            return


# ---------------------------------------------------------------------------
# Ambiguous values and sampling


def ambiguous_sender_value(experiment: ExperimentLike, game: GameSpec) -> float | None:
    """Sender's worst-case value of an ambiguous experiment under obedience,
    or None when the experiment is not obedient."""
    amb = as_ambiguous(experiment)
    if ambiguous_obedience(amb, game) is None:
        return None
    value, _ = ambiguous_meu_payoff(
        amb, game.obedient_strategy(), game.sender_payoff, game.priors
    )
    return value


def uniform_row_sampler(rng: np.random.Generator, n_states: int, n_actions: int) -> np.ndarray:
    """Componentwise-uniform rows, normalized. The default generator draw."""
    rows = rng.uniform(size=(n_states, n_actions))
    return rows / rows.sum(axis=1, keepdims=True)


RowSampler = Callable[[np.random.Generator, int, int], np.ndarray]


def random_canonical(
    rng: np.random.Generator, game: GameSpec, row_sampler: RowSampler = uniform_row_sampler
) -> StatisticalExperiment:
    return StatisticalExperiment(game.actions, row_sampler(rng, game.n_states, game.n_actions))


def sample_obedient_ambiguous(
    game: GameSpec,
    seed: int | np.random.Generator,
    n_generators: int,
    max_tries: int = 200,
    row_sampler: RowSampler = uniform_row_sampler,
) -> AmbiguousExperiment | None:
    """Rejection-sample an obedient ambiguous experiment; None when the try
    budget is exhausted. Deterministic for a fixed seed."""
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        amb = AmbiguousExperiment(
            tuple(random_canonical(rng, game, row_sampler) for _ in range(n_generators))
        )
        if ambiguous_obedience(amb, game) is not None:
            return amb
    return None


def has_obedient_member(
    experiment: ExperimentLike, game: GameSpec, mix_steps: int = 21
) -> bool:
    """Search generators and pairwise generator blends for an obedient member.

    Blend weights run over a uniform grid plus, per pair, the exact weight
    that flattens the receiver payoff line; for binary games that candidate
    set provably contains an obedient member whenever the experiment is
    obedient.
    """
    amb = as_ambiguous(experiment)
    for g in amb.generators:
        if statistical_obedience(g, game) is not None:
            return True
    grid = list(np.linspace(0.0, 1.0, mix_steps))
    for i, j in combinations(range(amb.n_generators), 2):
        ki, kj = amb.generators[i].kernel, amb.generators[j].kernel
        weights = list(grid)
        if game.is_binary:
            s_i = float(_receiver_slope(game, ki[0, 0], ki[1, 0]))
            s_j = float(_receiver_slope(game, kj[0, 0], kj[1, 0]))
            if abs(s_i - s_j) > 1e-14:
                t = s_j / (s_j - s_i)
                if 0.0 <= t <= 1.0:
                    weights.append(t)
        for t in weights:
            sigma = StatisticalExperiment(amb.messages, t * ki + (1.0 - t) * kj)
            if statistical_obedience(sigma, game) is not None:
                return True
    return False


def gain_search(
    game: GameSpec,
    budget: int,
    seed: int,
    resolution: float = 1e-3,
    generator_range: tuple[int, int] = (2, 5),
    row_sampler: RowSampler = uniform_row_sampler,
) -> tuple[GainReport, list[GainTrial]]:
    """Benchmark the statistical optimum against sampled obedient ambiguous
    experiments.

    Each trial draws one ambiguous experiment; obedient draws contribute a
    sender value and are probed for obedient members. The report carries
    the maximum ambiguous value found (None when no draw was obedient).
    """
    if budget < 0:
        raise InvariantViolation("budget must be nonnegative")
    v_stat = optimal_statistical_value(game, resolution=resolution).value
    trials: list[GainTrial] = []
    best: float | None = None
    obedient_count = 0
    lemma2 = 0
    lo, hi = generator_range
    for t in range(budget):
        ts = trial_seed(seed, t)
        rng = np.random.default_rng(ts)
        n_gen = int(rng.integers(lo, hi + 1))
        amb = AmbiguousExperiment(
            tuple(random_canonical(rng, game, row_sampler) for _ in range(n_gen))
        )
        witness = ambiguous_obedience(amb, game)
        if witness is None:
            trials.append(GainTrial(t, ts, False, None, False))
            continue
        value, _ = ambiguous_meu_payoff(
            amb, game.obedient_strategy(), game.sender_payoff, game.priors
        )
        obedient_count += 1
        candidate = not has_obedient_member(amb, game)
        if candidate:
            lemma2 += 1
        best = value if best is None else max(best, value)
        trials.append(GainTrial(t, ts, True, value, candidate))
    gap = None if best is None else best - v_stat
    report = GainReport(v_stat, best, gap, budget, obedient_count, lemma2, seed)
    return report, trials
