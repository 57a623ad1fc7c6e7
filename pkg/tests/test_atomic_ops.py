import numpy as np
import pytest

from evoops.atomic_ops import (
    ATOMIC_OPS,
    BINARY_OPS,
    GAUSSIAN_SIGMA_FRACTION,
    NON_NULL_OPS,
    NULL_OPS,
    UNARY_OPS,
    OpKind,
    apply_atomic,
    atomic_by_id,
    noise_sigma,
)
from evoops.core import RandomStream

from conftest import clone_streams, in_box


def test_descriptor_table_is_stable():
    assert [op.op_id for op in ATOMIC_OPS] == list(range(8))
    assert [op.kind for op in ATOMIC_OPS] == list(OpKind)
    assert [op.arity for op in ATOMIC_OPS] == [2, 2, 1, 1, 2, 2, 2, 2]
    assert all(op.is_null for op in NULL_OPS)
    assert [op.op_id for op in UNARY_OPS] == [2, 3]
    assert [op.op_id for op in BINARY_OPS] == [4, 5, 6, 7]
    assert NON_NULL_OPS == ATOMIC_OPS[2:8]
    assert atomic_by_id(7).name == "linear-crossover"
    with pytest.raises(ValueError):
        atomic_by_id(8)


def test_noise_sigma_is_a_range_fraction(sphere5):
    assert noise_sigma(sphere5) == GAUSSIAN_SIGMA_FRACTION * 4.0


def _genomes(sphere5, seed=1):
    rng = RandomStream(seed, "genomes")
    a = in_box(rng, sphere5)
    b = in_box(rng, sphere5)
    a.setflags(write=False)
    b.setflags(write=False)
    return a, b


def test_null_ops_return_their_argument_object(sphere5):
    a, b = _genomes(sphere5)
    rng = RandomStream(0)
    assert apply_atomic(ATOMIC_OPS[0], a, b, sphere5, rng) is a
    assert apply_atomic(ATOMIC_OPS[1], a, b, sphere5, rng) is b
    # and consume no randomness
    probe, ref = clone_streams(3, "nulls")
    apply_atomic(ATOMIC_OPS[0], a, b, sphere5, probe)
    assert probe.uniform() == ref.uniform()


class TestSwapGenes:
    def test_swaps_exactly_two_positions(self, sphere5):
        a, b = _genomes(sphere5)
        use, predict = clone_streams(11, "swap")
        out = apply_atomic(ATOMIC_OPS[2], a, None, sphere5, use)
        i = predict.integers(0, 5)
        j = predict.integers(0, 5)
        while j == i:
            j = predict.integers(0, 5)
        want = a.copy()
        want[i], want[j] = want[j], want[i]
        assert np.array_equal(out, want)
        assert i != j

    def test_dimension_one_is_identity_without_draws(self):
        from evoops.core import Direction, Problem

        p1 = Problem(id=0, name="p1", dimensionality=1, lower_bound=-1.0,
                     upper_bound=1.0, direction=Direction.MINIMIZE,
                     objective=lambda x: float(x[0]))
        a = np.array([0.25])
        a.setflags(write=False)
        use, ref = clone_streams(12, "swap1")
        out = apply_atomic(ATOMIC_OPS[2], a, None, p1, use)
        assert out is a
        assert use.uniform() == ref.uniform()


class TestGaussianNoise:
    def test_perturbs_one_gene_by_predicted_amount(self, sphere5):
        a, _ = _genomes(sphere5)
        use, predict = clone_streams(21, "noise")
        out = apply_atomic(ATOMIC_OPS[3], a, None, sphere5, use)
        pos = predict.integers(0, 5)
        z = predict.normal()
        want = min(2.0, max(-2.0, a[pos] + z * noise_sigma(sphere5)))
        changed = np.flatnonzero(out != a)
        assert changed.tolist() in ([pos], [])  # [] if the draw landed back on a[pos]
        assert out[pos] == want

    def test_clamps_at_the_box_edge(self, sphere5):
        a = np.full(5, 2.0)
        a.setflags(write=False)
        for seed in range(30):
            out = apply_atomic(ATOMIC_OPS[3], a, None, sphere5, RandomStream(seed, "edge"))
            assert np.all(out <= 2.0) and np.all(out >= -2.0)


class TestSinglePoint:
    def test_prefix_from_a_suffix_from_b(self, sphere5):
        a, b = _genomes(sphere5)
        use, predict = clone_streams(31, "cut")
        out = apply_atomic(ATOMIC_OPS[4], a, b, sphere5, use)
        k = predict.integers(1, 5)
        assert 1 <= k < 5
        assert np.array_equal(out[:k], a[:k])
        assert np.array_equal(out[k:], b[k:])

    def test_dimension_one_copies_a_without_draws(self):
        from evoops.core import Direction, Problem

        p1 = Problem(id=0, name="p1", dimensionality=1, lower_bound=-1.0,
                     upper_bound=1.0, direction=Direction.MINIMIZE,
                     objective=lambda x: float(x[0]))
        a = np.array([0.5])
        b = np.array([-0.5])
        use, ref = clone_streams(32, "cut1")
        out = apply_atomic(ATOMIC_OPS[4], a, b, p1, use)
        assert np.array_equal(out, a) and out is not a
        assert use.uniform() == ref.uniform()


def test_uniform_crossover_mask_semantics(sphere5):
    a, b = _genomes(sphere5)
    use, predict = clone_streams(41, "mask")
    out = apply_atomic(ATOMIC_OPS[5], a, b, sphere5, use)
    mask = predict.integer_array(0, 2, 5) == 1
    assert np.array_equal(out, np.where(mask, a, b))


def test_average_crossover_is_exact_midpoint(sphere5):
    a, b = _genomes(sphere5)
    out = apply_atomic(ATOMIC_OPS[6], a, b, sphere5, RandomStream(0))
    assert np.array_equal(out, 0.5 * (a + b))


class TestLinearCrossover:
    def test_weight_mapping_and_clip(self, sphere5):
        a, b = _genomes(sphere5)
        for seed in range(50):
            use, predict = clone_streams(51, "lin", seed)
            out = apply_atomic(ATOMIC_OPS[7], a, b, sphere5, use)
            w = predict.uniform() * 2.0 - 0.5
            want = np.clip(w * a + (1.0 - w) * b, -2.0, 2.0)
            assert np.array_equal(out, want)

    def test_extrapolates_on_both_sides(self, sphere5):
        # over many draws the weight must land in all three regimes
        lo = hi = mid = 0
        rng = RandomStream(52, "regimes")
        for _ in range(400):
            w = rng.uniform() * 2.0 - 0.5
            if w < 0.0:
                lo += 1
            elif w > 1.0:
                hi += 1
            else:
                mid += 1
        assert lo > 50 and hi > 50 and mid > 100

    def test_result_between_parents_when_interpolating(self, sphere5):
        a, b = _genomes(sphere5, seed=4)
        use, predict = clone_streams(53, "interp")
        w = predict.uniform() * 2.0 - 0.5
        out = apply_atomic(ATOMIC_OPS[7], a, b, sphere5, use)
        if 0.0 <= w <= 1.0:
            low = np.minimum(a, b)
            high = np.maximum(a, b)
            assert np.all(out >= low - 1e-12) and np.all(out <= high + 1e-12)


class TestApplyAtomicValidation:
    def test_binary_requires_b(self, sphere5):
        a, _ = _genomes(sphere5)
        with pytest.raises(ValueError):
            apply_atomic(ATOMIC_OPS[6], a, None, sphere5, RandomStream(0))

    def test_unary_rejects_b(self, sphere5):
        a, b = _genomes(sphere5)
        with pytest.raises(ValueError):
            apply_atomic(ATOMIC_OPS[3], a, b, sphere5, RandomStream(0))

    def test_shape_mismatch(self, sphere5):
        a, _ = _genomes(sphere5)
        with pytest.raises(ValueError):
            apply_atomic(ATOMIC_OPS[6], a, np.zeros(4), sphere5, RandomStream(0))

    def test_inputs_never_mutated(self, sphere5):
        a, b = _genomes(sphere5)
        snapshot_a, snapshot_b = a.copy(), b.copy()
        rng = RandomStream(60, "pure")
        for op in ATOMIC_OPS:
            apply_atomic(op, a, b if op.arity == 2 else None, sphere5, rng)
        assert np.array_equal(a, snapshot_a)
        assert np.array_equal(b, snapshot_b)
