import numpy as np
import pytest

from evoops.analysis import (
    DistanceMatrix,
    pairwise_distances,
    rate_trajectories,
    smacof_embed,
    tree_edit_distance,
)
from evoops.core import RandomStream
from evoops.engine import Algorithm, EngineConfig, aoea_run, ga_run, haea_run
from evoops.optree import parse_tree, random_tree, tree_size


class TestTreeEditDistance:
    def test_identical_trees_are_at_distance_zero(self):
        for seed in range(30):
            t = random_tree(RandomStream(seed, "ted"))
            assert tree_edit_distance(t, t) == 0

    def test_hand_cases(self):
        assert tree_edit_distance(parse_tree("(0)"), parse_tree("(1)")) == 1
        assert tree_edit_distance(parse_tree("(0)"), parse_tree("(2 (0))")) == 1
        assert tree_edit_distance(parse_tree("(4 (0) (1))"), parse_tree("(5 (0) (1))")) == 1
        assert tree_edit_distance(parse_tree("(4 (0) (1))"), parse_tree("(4 (1) (1))")) == 1
        # grow a unary chain over a leaf: pure insertions
        assert tree_edit_distance(parse_tree("(1)"), parse_tree("(2 (3 (2 (1))))")) == 3

    def test_symmetry_and_size_bounds(self):
        rng = RandomStream(31, "tedsym")
        for _ in range(40):
            t1 = random_tree(rng)
            t2 = random_tree(rng)
            d12 = tree_edit_distance(t1, t2)
            d21 = tree_edit_distance(t2, t1)
            assert d12 == d21
            assert abs(tree_size(t1) - tree_size(t2)) <= d12 <= tree_size(t1) + tree_size(t2)

    def test_triangle_inequality(self):
        rng = RandomStream(32, "tedtri")
        trees = [random_tree(rng) for _ in range(8)]
        for a in trees:
            for b in trees:
                for c in trees:
                    assert tree_edit_distance(a, c) <= (
                        tree_edit_distance(a, b) + tree_edit_distance(b, c)
                    )


class TestPairwiseDistances:
    def test_raw_matrix_properties(self):
        rng = RandomStream(33, "pd")
        trees = [random_tree(rng) for _ in range(6)]
        m = pairwise_distances(trees)
        assert m.n == 6
        assert np.array_equal(m.values, m.values.T)
        assert np.all(np.diag(m.values) == 0.0)
        assert m.values[0, 1] == tree_edit_distance(trees[0], trees[1])

    def test_size_sum_normalization(self):
        t1 = parse_tree("(0)")
        t2 = parse_tree("(2 (3 (2 (1))))")
        m = pairwise_distances([t1, t2], normalization="size_sum")
        # raw distance 4 (relabel the leaf, insert three unary nodes), sizes 1 + 4
        assert m.values[0, 1] == pytest.approx(4.0 / 5.0)

    def test_normalized_values_stay_below_one(self):
        rng = RandomStream(34, "pdn")
        trees = [random_tree(rng) for _ in range(10)]
        m = pairwise_distances(trees, normalization="size_sum")
        assert np.all(m.values <= 1.0) and np.all(m.values >= 0.0)

    def test_rejects_short_lists_and_unknown_modes(self):
        t = parse_tree("(0)")
        with pytest.raises(ValueError):
            pairwise_distances([t])
        with pytest.raises(ValueError):
            pairwise_distances([t, t], normalization="nope")


class TestDistanceMatrix:
    def test_validation(self):
        with pytest.raises(ValueError):
            DistanceMatrix(np.zeros((2, 3)))
        values = DistanceMatrix(np.zeros((3, 3))).values
        with pytest.raises(ValueError):
            values[0, 1] = 1.0  # frozen


class TestSmacof:
    def test_all_zero_matrix_collapses_to_origin(self):
        emb = smacof_embed(np.zeros((4, 4)), RandomStream(1, "z"))
        assert np.all(emb.points == 0.0)
        assert emb.stress == 0.0
        assert emb.iterations == 0

    def test_rejects_asymmetric_input(self):
        bad = np.array([[0.0, 1.0], [2.0, 0.0]])
        with pytest.raises(ValueError):
            smacof_embed(bad, RandomStream(2))
        with pytest.raises(ValueError):
            smacof_embed(np.zeros((2, 3)), RandomStream(2))

    def test_deterministic_for_a_given_stream_key(self):
        delta = pairwise_distances(
            [random_tree(RandomStream(s, "sm")) for s in range(5)]
        )
        e1 = smacof_embed(delta, RandomStream(5, "emb"))
        e2 = smacof_embed(delta, RandomStream(5, "emb"))
        assert np.array_equal(e1.points, e2.points)
        assert e1.stress == e2.stress

    def test_stress_history_never_increases(self):
        rng = RandomStream(35, "hist")
        trees = [random_tree(rng) for _ in range(7)]
        emb = smacof_embed(pairwise_distances(trees, normalization="size_sum"), rng)
        hist = emb.stress_history
        assert len(hist) == emb.iterations + 1 or len(hist) >= 1
        for a, b in zip(hist, hist[1:]):
            assert b <= a + 1e-12
        assert emb.points.shape == (7, 2)


class TestRateTrajectories:
    def _cfg(self, algorithm):
        return EngineConfig(
            problem_id=1, algorithm=algorithm, population_size=6,
            generations=12, seed=3, kappa=4, dimensionality=4,
        )

    def test_shapes_from_operator_pool_trace(self):
        trace = aoea_run(self._cfg(Algorithm.AOEA))
        traj = rate_trajectories(trace)
        assert traj.max_rates.shape == (13,)
        assert traj.rates.shape == (13, 4)
        assert np.allclose(traj.rates.sum(axis=1), 1.0, atol=1e-9)
        assert np.allclose(traj.rates.max(axis=1), traj.max_rates)

    def test_per_individual_rates_trace_also_works(self):
        trace = haea_run(self._cfg(Algorithm.HAEA))
        traj = rate_trajectories(trace)
        assert traj.rates.shape == (13, 6)  # six atomic operators

    def test_rejects_traces_without_rates(self):
        trace = ga_run(self._cfg(Algorithm.GA))
        with pytest.raises(ValueError):
            rate_trajectories(trace)
