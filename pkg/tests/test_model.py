import numpy as np
import pytest

from persuasion_lab import (
    AmbiguousExperiment,
    DimensionMismatch,
    GameSpec,
    InvariantViolation,
    PriorSet,
    ReceiverStrategy,
    StatisticalExperiment,
    ambiguous_meu_payoff,
    canonicalize,
    compose_strategy,
    expected_payoff,
    induced_joint,
    meu_payoff,
)

from conftest import binary_ambiguous, binary_experiment, make_g0


def brute_force_payoff(p, sigma, tau, u):
    """Independent oracle: the literal triple sum."""
    total = 0.0
    for w in range(sigma.kernel.shape[0]):
        for m in range(sigma.kernel.shape[1]):
            for a in range(tau.kernel.shape[1]):
                total += p[w] * sigma.kernel[w, m] * tau.kernel[m, a] * u[a, w]
    return total


class TestExpectedPayoff:
    def test_fully_revealing_matching(self, g0):
        sigma = binary_experiment(0.0, 1.0)
        tau = g0.obedient_strategy()
        assert expected_payoff([0.3, 0.7], sigma, tau, g0.receiver_payoff) == pytest.approx(1.0)

    def test_zero_payoffs(self, g0):
        sigma = binary_experiment(0.37, 0.91)
        tau = g0.obedient_strategy()
        assert expected_payoff([0.5, 0.5], sigma, tau, np.zeros((2, 2))) == 0.0

    def test_hand_summed_sender_value(self, g0):
        # 0.7 * (3/7) + 0.3 * 1 = 0.6, cross-checked by the brute-force oracle.
        sigma = binary_experiment(3.0 / 7.0, 1.0)
        tau = g0.obedient_strategy()
        got = expected_payoff([0.7, 0.3], sigma, tau, g0.sender_payoff)
        assert got == pytest.approx(0.6, abs=1e-12)
        oracle = brute_force_payoff([0.7, 0.3], sigma, tau, g0.sender_payoff)
        assert got == pytest.approx(oracle, abs=1e-12)

    def test_matches_brute_force_on_random_instances(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            n_s, n_m, n_a = rng.integers(2, 5, size=3)
            sigma = StatisticalExperiment(
                tuple(f"m{i}" for i in range(n_m)),
                rng.dirichlet(np.ones(n_m), size=n_s),
            )
            tau = ReceiverStrategy(
                sigma.messages,
                tuple(f"a{i}" for i in range(n_a)),
                rng.dirichlet(np.ones(n_a), size=n_m),
            )
            p = rng.dirichlet(np.ones(n_s))
            u = rng.normal(size=(n_a, n_s))
            assert expected_payoff(p, sigma, tau, u) == pytest.approx(
                brute_force_payoff(p, sigma, tau, u), abs=1e-10
            )

    def test_dimension_mismatch_raises(self, g0):
        sigma = binary_experiment(0.5, 0.5)
        tau = ReceiverStrategy(("x", "y", "z"), ("a", "b"), np.ones((3, 2)) / 2)
        with pytest.raises(DimensionMismatch):
            expected_payoff([0.5, 0.5], sigma, tau, g0.receiver_payoff)


class TestMeuPayoff:
    def test_constant_in_prior_keeps_all_vertices(self, g0):
        sigma = binary_experiment(0.0, 1.0)
        value, argmin = meu_payoff(sigma, g0.obedient_strategy(), g0.receiver_payoff, g0.priors)
        assert value == pytest.approx(1.0)
        assert argmin == (0, 1)

    def test_decreasing_line_hits_upper_endpoint(self, g0):
        # receiver line -0.2 p + 1 over [0.4, 0.6]; grid oracle at 1e-4.
        sigma = binary_experiment(0.2, 1.0)
        tau = g0.obedient_strategy()
        value, argmin = meu_payoff(sigma, tau, g0.receiver_payoff, g0.priors)
        assert value == pytest.approx(0.88, abs=1e-12)
        grid = np.linspace(0.4, 0.6, 2001)
        oracle = min(
            expected_payoff([p, 1 - p], sigma, tau, g0.receiver_payoff) for p in grid
        )
        assert value == pytest.approx(oracle, abs=1e-9)
        assert argmin == (1,)  # the p_hi vertex

    def test_singleton_prior_reduces_to_expected_payoff(self, g0_singleton):
        sigma = binary_experiment(0.3, 0.9)
        tau = g0_singleton.obedient_strategy()
        value, argmin = meu_payoff(
            sigma, tau, g0_singleton.receiver_payoff, g0_singleton.priors
        )
        assert value == pytest.approx(
            expected_payoff([0.7, 0.3], sigma, tau, g0_singleton.receiver_payoff)
        )
        assert argmin == (0,)

    def test_value_attained_at_reported_vertices(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            game = make_g0(prior_vertices=tuple(
                (p, 1 - p) for p in rng.uniform(size=3)
            ))
            sigma = binary_experiment(*rng.uniform(size=2))
            tau = game.obedient_strategy()
            value, argmin = meu_payoff(sigma, tau, game.receiver_payoff, game.priors)
            for i in argmin:
                at_vertex = expected_payoff(
                    game.priors.vertices[i], sigma, tau, game.receiver_payoff
                )
                assert abs(at_vertex - value) <= 1e-10


class TestAmbiguousMeuPayoff:
    def test_singleton_generator_equals_meu(self, g0):
        sigma = binary_experiment(0.2, 1.0)
        tau = g0.obedient_strategy()
        amb_value, _ = ambiguous_meu_payoff(
            AmbiguousExperiment((sigma,)), tau, g0.receiver_payoff, g0.priors
        )
        meu_value, _ = meu_payoff(sigma, tau, g0.receiver_payoff, g0.priors)
        assert amb_value == meu_value

    def test_worked_sender_minimum(self, g0, worked_sigma):
        # Four vertex pairs: 0.68, 0.52, 0.48, 0.32; 2-d grid oracle confirms.
        value, argmin = ambiguous_meu_payoff(
            worked_sigma, g0.obedient_strategy(), g0.sender_payoff, g0.priors
        )
        assert value == pytest.approx(0.32, abs=1e-12)
        assert argmin == ((1, 1),)
        oracle = np.inf
        for p in np.linspace(0.4, 0.6, 101):
            for t in np.linspace(0.0, 1.0, 101):
                x = t * 0.2
                y = t * 1.0 + (1 - t) * 0.8
                oracle = min(oracle, p * x + (1 - p) * y)
        assert value == pytest.approx(oracle, abs=1e-9)

    def test_constant_payoff(self, g0, worked_sigma):
        value, _ = ambiguous_meu_payoff(
            worked_sigma, g0.obedient_strategy(), np.full((2, 2), 3.25), g0.priors
        )
        assert value == pytest.approx(3.25)

    def test_never_exceeds_any_generator_meu(self, g0):
        rng = np.random.default_rng(5)
        tau = g0.obedient_strategy()
        for _ in range(50):
            amb = binary_ambiguous(*[tuple(rng.uniform(size=2)) for _ in range(3)])
            u = rng.normal(size=(2, 2))
            amb_value, _ = ambiguous_meu_payoff(amb, tau, u, g0.priors)
            for g in amb.generators:
                gen_value, _ = meu_payoff(g, tau, u, g0.priors)
                assert amb_value <= gen_value + 1e-12


class TestInducedJoint:
    def test_degenerate_prior(self, g0):
        sigma = binary_experiment(0.3, 0.8)
        joint = induced_joint([1.0, 0.0], sigma, g0)
        assert np.allclose(joint.mass[0], sigma.kernel[0])
        assert np.allclose(joint.mass[1], 0.0)

    def test_symmetric_revealing(self, g0):
        joint = induced_joint([0.5, 0.5], binary_experiment(0.0, 1.0), g0)
        assert joint.mass[0, 1] == pytest.approx(0.5)
        assert joint.mass[1, 0] == pytest.approx(0.5)
        assert joint.mass[0, 0] == joint.mass[1, 1] == 0.0

    def test_direct_product(self, g0):
        joint = induced_joint([0.6, 0.4], binary_experiment(0.2, 1.0), g0)
        assert np.allclose(joint.mass, [[0.12, 0.48], [0.4, 0.0]], atol=1e-15)

    def test_non_canonical_rejected(self, g0):
        sigma = StatisticalExperiment(("m1", "m2"), [[1.0, 0.0], [0.0, 1.0]])
        with pytest.raises(DimensionMismatch):
            induced_joint([0.5, 0.5], sigma, g0)

    def test_bilinear_in_prior_and_kernel(self, g0):
        rng = np.random.default_rng(3)
        for _ in range(50):
            p1, p2 = rng.dirichlet(np.ones(2)), rng.dirichlet(np.ones(2))
            s1 = binary_experiment(*rng.uniform(size=2))
            s2 = binary_experiment(*rng.uniform(size=2))
            a = float(rng.uniform())
            mix_p = a * p1 + (1 - a) * p2
            left = induced_joint(mix_p, s1, g0).mass
            right = a * induced_joint(p1, s1, g0).mass + (1 - a) * induced_joint(p2, s1, g0).mass
            assert np.max(np.abs(left - right)) <= 1e-12
            mix_kernel = a * s1.kernel + (1 - a) * s2.kernel
            s_mix = StatisticalExperiment(("a", "b"), mix_kernel)
            left = induced_joint(p1, s_mix, g0).mass
            right = a * induced_joint(p1, s1, g0).mass + (1 - a) * induced_joint(p1, s2, g0).mass
            assert np.max(np.abs(left - right)) <= 1e-12


class TestCanonicalize:
    def test_obedient_strategy_is_identity(self, g0, worked_sigma):
        result = canonicalize(worked_sigma, g0.obedient_strategy())
        for got, src in zip(result.generators, worked_sigma.generators):
            assert np.allclose(got.kernel, src.kernel, atol=1e-15)

    def test_constant_strategy_collapses(self, g0, worked_sigma):
        tau = ReceiverStrategy(("a", "b"), ("a", "b"), [[1.0, 0.0], [1.0, 0.0]])
        result = canonicalize(worked_sigma, tau)
        assert result.n_generators == 1  # duplicates merge
        assert np.allclose(result.generators[0].kernel, [[1.0, 0.0], [1.0, 0.0]])

    def test_two_message_example(self):
        sigma = StatisticalExperiment(("m1", "m2"), [[1.0, 0.0], [0.0, 1.0]])
        tau = ReceiverStrategy(("m1", "m2"), ("a", "b"), [[0.3, 0.7], [1.0, 0.0]])
        result = canonicalize(AmbiguousExperiment((sigma,)), tau)
        got = result.generators[0]
        assert got.messages == ("a", "b")
        assert got.kernel[0, 0] == pytest.approx(0.3)
        assert got.kernel[1, 0] == pytest.approx(1.0)

    def test_payoff_preservation_random(self):
        rng = np.random.default_rng(19)
        for _ in range(200):
            n_m = int(rng.integers(2, 5))
            sigma = StatisticalExperiment(
                tuple(f"m{i}" for i in range(n_m)), rng.dirichlet(np.ones(n_m), size=2)
            )
            tau = ReceiverStrategy(
                sigma.messages, ("a", "b"), rng.dirichlet(np.ones(2), size=n_m)
            )
            star = canonicalize(AmbiguousExperiment((sigma,)), tau).generators[0]
            tau_star = ReceiverStrategy.obedient(("a", "b"))
            p = rng.dirichlet(np.ones(2))
            u = rng.normal(size=(2, 2))
            assert expected_payoff(p, sigma, tau, u) == pytest.approx(
                expected_payoff(p, star, tau_star, u), abs=1e-10
            )


class TestComposeStrategy:
    def test_composition_kernel(self):
        tau = ReceiverStrategy(("m1", "m2"), ("a", "b"), [[0.4, 0.6], [1.0, 0.0]])
        delta = ReceiverStrategy(("a", "b"), ("a", "b"), [[0.5, 0.5], [0.0, 1.0]])
        composed = compose_strategy(tau, delta)
        assert composed.kernel[0, 0] == pytest.approx(0.4 * 0.5)
        assert composed.kernel[1, 0] == pytest.approx(0.5)

    def test_wrong_domain_rejected(self):
        tau = ReceiverStrategy(("m1",), ("a", "b"), [[0.4, 0.6]])
        delta = ReceiverStrategy(("c", "d"), ("a", "b"), [[1.0, 0.0], [0.0, 1.0]])
        with pytest.raises(DimensionMismatch):
            compose_strategy(tau, delta)


class TestConstruction:
    def test_prior_set_rejects_off_simplex_vertex(self):
        with pytest.raises(InvariantViolation):
            PriorSet([[0.5, 0.4]])

    def test_prior_interval(self):
        priors = PriorSet([[0.4, 0.6], [0.6, 0.4], [0.5, 0.5]])
        assert priors.interval() == (0.4, 0.6)

    def test_experiment_rejects_bad_rows(self):
        with pytest.raises(InvariantViolation):
            StatisticalExperiment(("a", "b"), [[0.5, 0.6], [0.5, 0.5]])

    def test_ambiguous_requires_shared_messages(self):
        s1 = StatisticalExperiment(("a", "b"), [[0.5, 0.5], [0.5, 0.5]])
        s2 = StatisticalExperiment(("x", "y"), [[0.5, 0.5], [0.5, 0.5]])
        with pytest.raises(DimensionMismatch):
            AmbiguousExperiment((s1, s2))

    def test_ambiguous_deduplicates(self):
        amb = binary_ambiguous((0.2, 1.0), (0.2, 1.0), (0.0, 0.8))
        assert amb.n_generators == 2

    def test_game_rejects_mismatched_payoff_shape(self):
        with pytest.raises(DimensionMismatch):
            GameSpec(("w1", "w2"), ("a", "b"), [[1.0, 1.0]], [[0.0, 1.0], [1.0, 0.0]],
                     PriorSet([[0.5, 0.5]]))

    def test_arrays_are_immutable(self, g0):
        with pytest.raises(ValueError):
            g0.receiver_payoff[0, 0] = 5.0

    def test_mixture_member(self, worked_sigma):
        mixed = worked_sigma.mixture([0.5, 0.5])
        assert mixed.kernel[0, 0] == pytest.approx(0.1)
        assert mixed.kernel[1, 0] == pytest.approx(0.9)
