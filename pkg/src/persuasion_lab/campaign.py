"""Randomized verification campaigns and instance samplers.

Each trial derives its own RNG from a stable hash of (seed, trial index),
so campaigns are reproducible, resumable, and independent of scheduling;
aggregation only uses order-insensitive reductions. The worker count is
capped by the PERSUASION_LAB_THREADS environment variable (default 1).
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .binary import construct_sigma_hat
from .errors import TheoremViolation
from .model import AmbiguousExperiment, GameSpec, PriorSet
from .senderopt import random_canonical, trial_seed
from .obedience import ambiguous_obedience


def thread_cap() -> int:
    raw = os.environ.get("PERSUASION_LAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def random_binary_game(
    rng: np.random.Generator,
    require_mixed: bool = True,
    singleton_prior: bool = False,
) -> GameSpec:
    """Binary game with uniform payoffs in [-1, 1] and a random interval
    prior; receiver payoffs are redrawn until the deviation vector has
    mixed signs (no weakly dominant action) when ``require_mixed``."""
    while True:
        receiver = rng.uniform(-1.0, 1.0, size=(2, 2))
        v = receiver[1] - receiver[0]
        if not require_mixed or v[0] * v[1] < 0:
            break
    sender = rng.uniform(-1.0, 1.0, size=(2, 2))
    if singleton_prior:
        p = float(rng.uniform())
        vertices = [[p, 1.0 - p]]
    else:
        lo, hi = sorted(rng.uniform(size=2).tolist())
        vertices = [[lo, 1.0 - lo], [hi, 1.0 - hi]]
    return GameSpec(("w1", "w2"), ("a", "b"), sender, receiver, PriorSet(vertices))


def random_game(
    rng: np.random.Generator, n_states: int, n_actions: int, n_prior_vertices: int = 2
) -> GameSpec:
    """General random game with Dirichlet-uniform prior vertices."""
    states = tuple(f"w{i + 1}" for i in range(n_states))
    actions = tuple(f"a{i + 1}" for i in range(n_actions))
    sender = rng.uniform(-1.0, 1.0, size=(n_actions, n_states))
    receiver = rng.uniform(-1.0, 1.0, size=(n_actions, n_states))
    vertices = rng.dirichlet(np.ones(n_states), size=n_prior_vertices)
    return GameSpec(states, actions, sender, receiver, PriorSet(vertices))


@dataclass(frozen=True)
class TheoremTrial:
    """One certified instance of the no-gain construction."""

    trial: int
    seed: int
    n_generators: int
    p_lo: float
    p_hi: float
    alpha: float
    lam: float
    hat_x: float
    hat_y: float
    margin: float
    sample_attempts: int


@dataclass(frozen=True)
class TheoremReport:
    instances: int
    violations: int
    seed: int
    max_margin_deficit: float  # most negative obedience margin seen (>= -tol)

    def to_json(self) -> dict:
        return {
            "instances": self.instances,
            "violations": self.violations,
            "seed": self.seed,
            "max_margin_deficit": self.max_margin_deficit,
        }


def _theorem_trial(args: tuple[int, int, dict | None]) -> TheoremTrial | dict:
    """One campaign instance; theorem violations come back as diagnostics
    dicts so they survive process boundaries."""
    trial, seed, game_dict = args
    ts = trial_seed(seed, trial)
    rng = np.random.default_rng(ts)
    attempts = 0
    try:
        while True:
            if game_dict is None:
                game = random_binary_game(rng)
            else:
                from .fileio import game_from_dict

                game = game_from_dict(game_dict)
            # Draw ambiguous experiments until one is obedient; redraw the
            # game (random mode) every 50 failed draws.
            for _ in range(50):
                attempts += 1
                n_gen = int(rng.integers(2, 6))
                amb = AmbiguousExperiment(
                    tuple(random_canonical(rng, game) for _ in range(n_gen))
                )
                if ambiguous_obedience(amb, game) is None:
                    continue
                witness = construct_sigma_hat(amb, game)
                p_lo, p_hi = game.priors.interval()
                return TheoremTrial(
                    trial,
                    ts,
                    amb.n_generators,
                    p_lo,
                    p_hi,
                    witness.alpha,
                    witness.lam,
                    witness.sigma_hat.x,
                    witness.sigma_hat.y,
                    witness.margin,
                    attempts,
                )
            if game_dict is not None and attempts >= 10_000:
                return {
                    "trial": trial,
                    "reason": "no obedient ambiguous experiment found within the attempt budget",
                    "attempts": attempts,
                }
    except TheoremViolation as exc:
        return {"trial": trial, **exc.diagnostics}


def theorem_campaign(
    n_instances: int,
    seed: int,
    game: GameSpec | None = None,
    workers: int | None = None,
) -> tuple[TheoremReport, list[TheoremTrial], list[dict]]:
    """Run the no-gain construction on random obedient instances.

    Returns the aggregate report, the per-trial records, and diagnostics of
    any violations (empty on success). When ``game`` is given all trials
    use it; otherwise each trial samples its own binary game.
    """
    from .fileio import game_to_dict

    game_dict = None if game is None else game_to_dict(game)
    jobs = [(t, seed, game_dict) for t in range(n_instances)]
    workers = thread_cap() if workers is None else max(1, workers)
    records: list[TheoremTrial] = []
    failures: list[dict] = []
    if workers == 1:
        outcomes = map(_theorem_trial, jobs)
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        outcomes = pool.map(_theorem_trial, jobs, chunksize=16)
    for outcome in outcomes:
        if isinstance(outcome, TheoremTrial):
            records.append(outcome)
        else:
            failures.append(outcome)
    if workers > 1:
        pool.shutdown()
    records.sort(key=lambda r: r.trial)
    worst = min((r.margin for r in records), default=0.0)
    report = TheoremReport(n_instances, len(failures), seed, float(min(worst, 0.0)))
    return report, records, failures
