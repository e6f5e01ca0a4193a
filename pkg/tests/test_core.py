"""Energy arithmetic, spin configurations, and tunnel contributions."""

import numpy as np
import pytest

from isingpp import (
    ENERGY_ATOL,
    IsingProblem,
    SpinConfiguration,
    Tunnel,
    energy,
    single_flip_delta,
    tunnel_contribution,
    validate_energy_cache,
)
from isingpp.errors import DimensionError
from isingpp.mqc import disagreement_tunnels

from conftest import make_chimera_problem, oracle_energy


class TestIsingProblem:
    def test_energy_hand_example(self):
        # h: 1*(-1) + (-1)*(+1) = -2; J: 0.5*(-1)*(+1) = -0.5
        problem = IsingProblem(2, h={0: 1.0, 1: -1.0}, J={(0, 1): 0.5})
        assert problem.evaluate([-1, 1]) == pytest.approx(-2.5)

    def test_energy_deterministic(self):
        problem = make_chimera_problem(seed=7)
        spins = np.ones(problem.vertex_count, dtype=np.int8)
        assert problem.evaluate(spins) == problem.evaluate(spins)

    def test_all_plus_one_sums_coefficients(self):
        problem = make_chimera_problem(seed=12)
        expected = sum(problem.h.values()) + sum(problem.J.values())
        assert problem.evaluate(np.ones(problem.vertex_count)) == pytest.approx(expected)

    def test_energy_matches_termwise_oracle(self):
        rng = np.random.default_rng(41)
        for seed in range(30):
            problem = make_chimera_problem(seed=seed, rows=1, cols=2)
            spins = rng.choice([-1, 1], size=problem.vertex_count)
            assert problem.evaluate(spins) == pytest.approx(
                oracle_energy(problem, spins), abs=ENERGY_ATOL)

    def test_energy_order_invariant(self):
        """Evaluating terms in shuffled order lands within tolerance."""
        rng = np.random.default_rng(90)
        problem = make_chimera_problem(seed=5)
        spins = rng.choice([-1, 1], size=problem.vertex_count)
        terms = [v * float(spins[a]) for a, v in problem.h.items()]
        terms += [w * float(spins[a]) * float(spins[b]) for (a, b), w in problem.J.items()]
        for _ in range(20):
            rng.shuffle(terms)
            assert sum(terms) == pytest.approx(problem.evaluate(spins), abs=ENERGY_ATOL)

    def test_global_flip_symmetry_without_fields(self):
        problem = IsingProblem(6, J={(a, a + 1): 0.7 - 0.3 * a for a in range(5)})
        rng = np.random.default_rng(3)
        for _ in range(25):
            spins = rng.choice([-1, 1], size=6)
            assert problem.evaluate(spins) == problem.evaluate(-spins)

    def test_evaluate_many_matches_scalar(self):
        problem = make_chimera_problem(seed=8, rows=1, cols=1)
        rng = np.random.default_rng(17)
        matrix = rng.choice([-1, 1], size=(40, problem.vertex_count))
        batch = problem.evaluate_many(matrix)
        for row, e in zip(matrix, batch):
            assert e == pytest.approx(problem.evaluate(row), abs=ENERGY_ATOL)

    def test_length_mismatch_rejected(self):
        problem = IsingProblem(3, h={0: 1.0})
        with pytest.raises(DimensionError):
            problem.evaluate([1, -1])
        with pytest.raises(DimensionError):
            problem.evaluate_many(np.ones((4, 5)))

    def test_empty_problem(self):
        problem = IsingProblem(0)
        assert problem.evaluate([]) == 0.0
        assert problem.edge_list == []

    def test_vertices_without_coefficients_contribute_nothing(self):
        problem = IsingProblem(5, h={1: 2.0})
        assert problem.evaluate([1, -1, 1, 1, 1]) == pytest.approx(-2.0)

    def test_invalid_construction(self):
        with pytest.raises(DimensionError):
            IsingProblem(-1)
        with pytest.raises(IndexError):
            IsingProblem(2, h={3: 1.0})
        with pytest.raises(IndexError):
            IsingProblem(2, J={(0, 0): 1.0})
        with pytest.raises(IndexError):
            IsingProblem(2, J={(0, 5): 1.0})

    def test_duplicate_pair_rejected(self):
        with pytest.raises(IndexError):
            IsingProblem(2, J={(0, 1): 1.0, (1, 0): 2.0})

    def test_pair_normalization(self):
        problem = IsingProblem(3, J={(2, 0): 0.25})
        assert problem.J == {(0, 2): 0.25}
        assert problem.edge_list == [(0, 2)]

    def test_adjacency_symmetric(self):
        problem = IsingProblem(3, J={(0, 1): 1.0, (1, 2): -1.0})
        adj = problem.adjacency
        assert adj[0] == [(1, 1.0)]
        assert adj[1] == [(0, 1.0), (2, -1.0)]
        assert adj[2] == [(1, -1.0)]

    def test_content_hash_stable_and_sensitive(self):
        a = IsingProblem(2, h={0: 1.0}, J={(0, 1): 0.5})
        b = IsingProblem(2, h={0: 1.0}, J={(0, 1): 0.5})
        c = IsingProblem(2, h={0: 1.0}, J={(0, 1): 0.5 + 1e-12})
        assert a.content_hash() == b.content_hash()
        assert a.content_hash() != c.content_hash()


class TestSpinConfiguration:
    def test_rejects_non_spin_values(self):
        with pytest.raises(ValueError):
            SpinConfiguration(np.array([1, 0, -1]), 0.0)

    def test_spins_read_only(self):
        config = SpinConfiguration(np.array([1, -1]), 0.0)
        with pytest.raises(ValueError):
            config.spins[0] = -1

    def test_same_spins(self):
        a = SpinConfiguration(np.array([1, -1]), 0.0)
        b = SpinConfiguration(np.array([1, -1]), 5.0)
        c = SpinConfiguration(np.array([-1, -1]), 0.0)
        assert a.same_spins(b)
        assert not a.same_spins(c)
        assert len(a) == 2

    def test_cache_validation(self):
        problem = IsingProblem(2, h={0: 1.0, 1: -1.0}, J={(0, 1): 0.5})
        good = problem.configuration([-1, 1])
        validate_energy_cache(problem, good)
        stale = SpinConfiguration(np.array([-1, 1]), -2.0)
        with pytest.raises(ValueError):
            validate_energy_cache(problem, stale)

    def test_energy_helper_ignores_cache(self):
        problem = IsingProblem(2, h={0: 1.0, 1: -1.0}, J={(0, 1): 0.5})
        stale = SpinConfiguration(np.array([-1, 1]), 99.0)
        assert energy(problem, stale) == pytest.approx(-2.5)


class TestTunnel:
    def test_sorted_and_deduplicated(self):
        t = Tunnel((3, 1, 1, 2))
        assert t.vertices == (1, 2, 3)
        assert 2 in t
        assert len(t) == 3

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            Tunnel(())


class TestTunnelContribution:
    def test_single_boundary_edge(self):
        # tunnel {0}: no field, one edge to the exterior: J01 * s0 * s1 = (-1)(-1)(+1)
        problem = IsingProblem(3, J={(0, 1): -1.0, (1, 2): -1.0})
        config = problem.configuration([-1, 1, 1])
        assert tunnel_contribution(problem, config, Tunnel((0,))) == pytest.approx(1.0)

    def test_whole_graph_tunnel_has_no_boundary(self):
        problem = make_chimera_problem(seed=3, rows=1, cols=1)
        rng = np.random.default_rng(3)
        spins = rng.choice([-1, 1], size=problem.vertex_count)
        config = problem.configuration(spins)
        t = Tunnel(tuple(range(problem.vertex_count)))
        expected = sum(v * float(spins[a]) for a, v in problem.h.items())
        assert tunnel_contribution(problem, config, t) == pytest.approx(expected, abs=ENERGY_ATOL)

    def test_out_of_range_vertex(self):
        problem = IsingProblem(2, J={(0, 1): 1.0})
        config = problem.configuration([1, 1])
        with pytest.raises(IndexError):
            tunnel_contribution(problem, config, Tunnel((5,)))

    def test_negates_exactly_under_tunnel_flip(self):
        """Internal edges are excluded, so the flipped value is the exact negation."""
        rng = np.random.default_rng(22)
        problem = make_chimera_problem(seed=9, rows=1, cols=2)
        for _ in range(50):
            spins = rng.choice([-1, 1], size=problem.vertex_count)
            verts = rng.choice(problem.vertex_count,
                               size=rng.integers(1, 6), replace=False)
            tunnel = Tunnel(tuple(int(v) for v in verts))
            flipped = spins.copy()
            flipped[list(tunnel)] *= -1
            before = tunnel_contribution(problem, problem.configuration(spins), tunnel)
            after = tunnel_contribution(problem, problem.configuration(flipped), tunnel)
            assert after == -before

    def test_flip_identity_against_double_evaluation(self):
        """Swapping a disagreement tunnel's spins changes the total energy by
        exactly the contribution difference (checked by two full evaluations)."""
        rng = np.random.default_rng(100)
        checked = 0
        pair_index = 0
        while checked < 200:
            problem = make_chimera_problem(seed=1000 + pair_index, rows=1, cols=2)
            pair_index += 1
            s1 = rng.choice([-1, 1], size=problem.vertex_count)
            s2 = rng.choice([-1, 1], size=problem.vertex_count)
            r1 = problem.configuration(s1)
            r2 = problem.configuration(s2)
            for tunnel in disagreement_tunnels(problem, r1, r2):
                swapped = s1.copy()
                swapped[list(tunnel)] = s2[list(tunnel)]
                delta_total = problem.evaluate(swapped) - problem.evaluate(s1)
                delta_contrib = (
                    tunnel_contribution(problem, problem.configuration(swapped), tunnel)
                    - tunnel_contribution(problem, r1, tunnel)
                )
                assert abs(delta_total - delta_contrib) <= 1e-9
                checked += 1


class TestSingleFlipDelta:
    def test_matches_two_full_evaluations(self):
        rng = np.random.default_rng(55)
        for trial in range(100):
            problem = make_chimera_problem(seed=200 + trial % 10, rows=1, cols=2)
            spins = rng.choice([-1, 1], size=problem.vertex_count)
            vertex = int(rng.integers(problem.vertex_count))
            flipped = spins.copy()
            flipped[vertex] *= -1
            expected = problem.evaluate(flipped) - problem.evaluate(spins)
            assert single_flip_delta(problem, spins, vertex) == pytest.approx(
                expected, abs=1e-9)

    def test_isolated_vertex(self):
        problem = IsingProblem(2, h={0: 1.5})
        # flipping s0 from +1 to -1: E goes 1.5 -> -1.5
        assert single_flip_delta(problem, np.array([1, 1]), 0) == pytest.approx(-3.0)
        assert single_flip_delta(problem, np.array([1, 1]), 1) == 0.0

    def test_vertex_out_of_range(self):
        problem = IsingProblem(2, h={0: 1.0})
        with pytest.raises(IndexError):
            single_flip_delta(problem, np.array([1, 1]), 2)
