import numpy as np
import pytest

from persuasion_lab import (
    AmbiguousExperiment,
    GameSpec,
    JointDistribution,
    PriorSet,
    ambiguous_meu_payoff,
    ambiguous_obedience,
    deviation_vectors,
    expected_payoff,
    induced_joint,
    joint_obedience,
    k_star,
    statistical_obedience,
    witness_joint,
    worst_case_priors,
)
from persuasion_lab.obedience import slack_matrix

from conftest import binary_ambiguous, binary_experiment, make_g0


class TestDeviationVectors:
    def test_g0_pairs(self, g0):
        devs = {(d.from_action, d.to_action): d.values for d in deviation_vectors(g0)}
        assert np.allclose(devs[("a", "b")], [1.0, -1.0])
        assert np.allclose(devs[("b", "a")], [-1.0, 1.0])


class TestJointObedience:
    def test_diagonal_matching_joint(self, g0):
        joint = JointDistribution(g0.states, g0.actions, [[0.0, 0.5], [0.5, 0.0]])
        ok, slack = joint_obedience(joint, g0)
        assert ok
        assert np.all(slack[~np.eye(2, dtype=bool)] <= 0.0)

    def test_mass_on_bad_recommendation(self, g0):
        joint = JointDistribution(g0.states, g0.actions, [[1.0, 0.0], [0.0, 0.0]])
        ok, slack = joint_obedience(joint, g0)
        assert not ok
        assert slack[0, 1] == pytest.approx(1.0)  # a -> b deviation gains 1

    def test_dominant_action_requires_all_mass_on_it(self):
        # Receiver payoffs make action b weakly dominant.
        game = GameSpec(
            ("w1", "w2"), ("a", "b"),
            [[1.0, 1.0], [0.0, 0.0]],
            [[0.0, 1.0], [1.0, 2.0]],
            PriorSet([[0.5, 0.5]]),
        )
        only_b = JointDistribution(game.states, game.actions, [[0.0, 0.5], [0.0, 0.5]])
        mixed = JointDistribution(game.states, game.actions, [[0.2, 0.3], [0.0, 0.5]])
        assert joint_obedience(only_b, game)[0]
        assert not joint_obedience(mixed, game)[0]


class TestWorstCasePriors:
    def test_flat_line_keeps_every_vertex(self, g0):
        face = worst_case_priors(binary_experiment(0.0, 1.0), g0)
        assert face.vertex_indices == (0, 1)

    def test_decreasing_line(self, g0):
        face = worst_case_priors(binary_experiment(0.2, 1.0), g0)
        assert face.vertex_indices == (1,)  # p_hi = 0.6
        assert face.value == pytest.approx(0.88)

    def test_increasing_line(self, g0):
        face = worst_case_priors(binary_experiment(0.0, 0.8), g0)
        assert face.vertex_indices == (0,)  # p_lo = 0.4
        assert face.value == pytest.approx(0.88)


class TestStatisticalObedience:
    def test_fully_revealing_always_witnessed(self, g0):
        witness = statistical_obedience(binary_experiment(0.0, 1.0), g0)
        assert witness is not None
        assert witness.kind == "statistical"
        assert witness.max_slack <= 1e-8

    def test_always_a_depends_on_interval(self):
        sigma = binary_experiment(1.0, 1.0)
        low = make_g0(prior_vertices=((0.2, 0.8), (0.4, 0.6)))
        w = statistical_obedience(sigma, low)
        assert w is not None
        assert w.prior[0] == pytest.approx(0.4)
        high = make_g0(prior_vertices=((0.3, 0.7), (0.6, 0.4)))
        assert statistical_obedience(sigma, high) is None
        # Grid oracle: no prior on the worst face passes the joint test.
        for p in np.linspace(0.6, 0.6, 1):
            ok, _ = joint_obedience(induced_joint([p, 1 - p], sigma, high), high)
            assert not ok

    def test_zero_slack_boundary_case(self, g0_singleton):
        sigma = binary_experiment(3.0 / 7.0, 1.0)
        witness = statistical_obedience(sigma, g0_singleton)
        assert witness is not None
        assert witness.prior[0] == pytest.approx(0.7)
        assert witness.slack[0, 1] == pytest.approx(0.0, abs=1e-12)

    def test_grid_oracle_agreement(self):
        # Feasibility over the worst-prior face agrees with a dense prior grid.
        rng = np.random.default_rng(23)
        for _ in range(50):
            lo, hi = sorted(rng.uniform(size=2).tolist())
            game = make_g0(prior_vertices=((lo, 1 - lo), (hi, 1 - hi)))
            sigma = binary_experiment(*rng.uniform(size=2))
            witness = statistical_obedience(sigma, game)
            face = worst_case_priors(sigma, game)
            face_vals = [game.priors.vertices[i][0] for i in face.vertex_indices]
            f_lo, f_hi = min(face_vals), max(face_vals)
            grid_ok = any(
                joint_obedience(induced_joint([p, 1 - p], sigma, game), game)[0]
                for p in np.linspace(f_lo, f_hi, 201)
            )
            if witness is not None:
                ok, _ = joint_obedience(witness_joint(witness, sigma, game), game)
                assert ok
            if grid_ok:
                assert witness is not None


class TestKStar:
    def test_singletons(self, g0_singleton):
        amb = binary_ambiguous((0.3, 0.9))
        face = k_star(amb, g0_singleton)
        assert face.minimizing_pairs == ((0, 0),)

    def test_worked_instance(self, g0, worked_sigma):
        face = k_star(worked_sigma, g0)
        assert face.value == pytest.approx(0.88, abs=1e-12)
        assert set(face.minimizing_pairs) == {(1, 0), (0, 1)}
        # Fine 2-d grid over (prior, mixing weight) as oracle.
        oracle = np.inf
        tau = g0.obedient_strategy()
        for p in np.linspace(0.4, 0.6, 81):
            for t in np.linspace(0.0, 1.0, 81):
                sigma = worked_sigma.mixture([t, 1 - t])
                oracle = min(oracle, expected_payoff([p, 1 - p], sigma, tau, g0.receiver_payoff))
        assert face.value == pytest.approx(oracle, abs=1e-9)

    def test_identical_generators_reduce_to_statistical(self, g0):
        sigma = binary_experiment(0.2, 1.0)
        amb = AmbiguousExperiment((sigma, binary_experiment(0.2, 1.0)))
        face = k_star(amb, g0)
        stat_face = worst_case_priors(sigma, g0)
        assert {i for i, _ in face.minimizing_pairs} == set(stat_face.vertex_indices)

    def test_value_matches_ambiguous_meu(self, g0):
        rng = np.random.default_rng(31)
        for _ in range(100):
            amb = binary_ambiguous(*[tuple(rng.uniform(size=2)) for _ in range(3)])
            face = k_star(amb, g0)
            value, _ = ambiguous_meu_payoff(
                amb, g0.obedient_strategy(), g0.receiver_payoff, g0.priors
            )
            assert face.value == pytest.approx(value, abs=1e-10)


class TestAmbiguousObedience:
    def test_singleton_agrees_with_statistical(self, g0):
        rng = np.random.default_rng(41)
        for _ in range(100):
            sigma = binary_experiment(*rng.uniform(size=2))
            amb = AmbiguousExperiment((sigma,))
            assert (ambiguous_obedience(amb, g0) is not None) == (
                statistical_obedience(sigma, g0) is not None
            )

    def test_worked_witness(self, g0, worked_sigma):
        witness = ambiguous_obedience(worked_sigma, g0)
        assert witness is not None
        weights = {(fw.prior_vertex, fw.generator): fw.weight for fw in witness.face_weights}
        assert weights[(0, 1)] == pytest.approx(0.5, abs=1e-9)
        assert weights[(1, 0)] == pytest.approx(0.5, abs=1e-9)
        assert witness.slack[0, 1] == pytest.approx(-0.38, abs=1e-9)
        assert witness.slack[1, 0] == pytest.approx(-0.38, abs=1e-9)
        # Alpha-grid oracle over the two face pairs.
        joints = [
            induced_joint([0.4, 0.6], worked_sigma.generators[1], g0).mass,
            induced_joint([0.6, 0.4], worked_sigma.generators[0], g0).mass,
        ]
        feasible = False
        for a in np.linspace(0, 1, 201):
            mix = JointDistribution(g0.states, g0.actions, a * joints[0] + (1 - a) * joints[1])
            feasible = feasible or joint_obedience(mix, g0)[0]
        assert feasible

    def test_dominated_recommendation_has_no_witness(self, g0):
        # Both generators always recommend a; in the matching game the
        # receiver-minimal face contains only strongly violating joints.
        amb = binary_ambiguous((1.0, 1.0), (1.0, 0.9))
        assert ambiguous_obedience(amb, g0) is None

    def test_witness_joint_revalidates(self, g0):
        rng = np.random.default_rng(43)
        found = 0
        for _ in range(200):
            amb = binary_ambiguous(*[tuple(rng.uniform(size=2)) for _ in range(3)])
            witness = ambiguous_obedience(amb, g0)
            if witness is None:
                continue
            found += 1
            ok, slack = joint_obedience(witness_joint(witness, amb, g0), g0)
            assert ok
            assert np.max(slack[~np.eye(2, dtype=bool)]) <= 1e-8
            total = sum(fw.weight for fw in witness.face_weights)
            assert total == pytest.approx(1.0, abs=1e-10)
        assert found > 10


class TestSingletonPriorReduction:
    def test_obedient_ambiguous_implies_obedient_generator(self):
        rng = np.random.default_rng(47)
        checked = 0
        while checked < 100:
            p = float(rng.uniform())
            game = make_g0(prior_vertices=((p, 1 - p),))
            amb = binary_ambiguous(*[tuple(rng.uniform(size=2)) for _ in range(3)])
            if ambiguous_obedience(amb, game) is None:
                continue
            checked += 1
            assert any(
                statistical_obedience(g, game) is not None for g in amb.generators
            )
