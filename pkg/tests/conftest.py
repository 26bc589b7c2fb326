import numpy as np
import pytest

from persuasion_lab import (
    AmbiguousExperiment,
    GameSpec,
    PriorSet,
    StatisticalExperiment,
)


def make_g0(prior_vertices=((0.4, 0.6), (0.6, 0.4))):
    """The matching game: receiver wants b in state 1 and a in state 2,
    sender wants action a always."""
    return GameSpec(
        states=("w1", "w2"),
        actions=("a", "b"),
        sender_payoff=[[1.0, 1.0], [0.0, 0.0]],
        receiver_payoff=[[0.0, 1.0], [1.0, 0.0]],
        priors=PriorSet(list(prior_vertices)),
    )


def binary_experiment(x, y, actions=("a", "b")):
    """Canonical binary experiment from first-action probabilities."""
    return StatisticalExperiment(actions, [[x, 1.0 - x], [y, 1.0 - y]])


def binary_ambiguous(*xys):
    return AmbiguousExperiment(tuple(binary_experiment(x, y) for x, y in xys))


def interval_prior(lo, hi):
    return PriorSet([[lo, 1.0 - lo], [hi, 1.0 - hi]])


@pytest.fixture
def g0():
    return make_g0()


@pytest.fixture
def g0_singleton():
    return make_g0(prior_vertices=((0.7, 0.3),))


@pytest.fixture
def worked_sigma():
    """Generators of the worked ambiguous experiment conv{(0.2,1), (0,0.8)}."""
    return binary_ambiguous((0.2, 1.0), (0.0, 0.8))


def random_prior_interval(rng):
    lo, hi = sorted(rng.uniform(size=2).tolist())
    return interval_prior(lo, hi)


def fully_revealing_g0():
    return binary_experiment(0.0, 1.0)
