import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ginnacer.icf import layer_centroid
from ginnacer.partition import (
    PartitionError,
    check_partition,
    is_valid_subset,
    merged_upper_params,
    potentials,
    valid_partition,
)


def reference_partition(SW, Sb, xc):
    """Plain double loop over pairs, recomputing each union from scratch."""
    n = SW.shape[0]
    D = {i: [i] for i in range(n)}
    count = 0
    for i in range(n - 1):
        for j in range(i + 1, n):
            if i in D and j in D:
                count += 1
                union = D[i] + D[j]
                V, u = merged_upper_params(SW, Sb, union)
                if is_valid_subset(V, u, xc):
                    D[i] = union
                    del D[j]
    return [sorted(g) for _, g in sorted(D.items())], count


def canonical_layer(rng, n, n_in, scale=1.0):
    W = rng.normal(size=(n, n_in)) * scale
    b = rng.normal(size=n) * 0.1
    xc = np.abs(rng.normal(size=n_in)) * (rng.random(n_in) < 0.6)
    ctx = layer_centroid(W, b, xc)
    s = ctx.sign_vector
    return s[:, None] * W, s * b, xc


class TestMergedParams:
    def test_hand_example(self):
        V, u = merged_upper_params([[1, -2], [0, -1]], [-3, -1], [0, 1])
        assert V.tolist() == [1, -1] and u == -1

    def test_singleton(self, rng):
        SW, Sb = rng.normal(size=(4, 3)), rng.normal(size=4)
        V, u = merged_upper_params(SW, Sb, [2])
        assert np.array_equal(V, SW[2]) and u == Sb[2]

    def test_identical_rows(self):
        V, u = merged_upper_params([[1.5, -2.0], [1.5, -2.0]], [0.5, 0.5], [0, 1])
        assert V.tolist() == [1.5, -2.0] and u == 0.5

    def test_errors(self):
        with pytest.raises(PartitionError):
            merged_upper_params(np.ones((2, 2)), np.ones(2), [])
        with pytest.raises(PartitionError):
            merged_upper_params(np.ones((2, 2)), np.ones(2), [0, 2])


class TestValidSubset:
    def test_hand_examples(self):
        assert is_valid_subset([1, -1], -1, [0, 0])
        assert not is_valid_subset([1, -1], -1, [2, 0])

    def test_boundary_zero_is_valid(self):
        assert is_valid_subset([1.0, 0.0], -2.0, [2.0, 5.0])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            is_valid_subset([1, 2, 3], 0, [0, 0])

    def test_singletons_valid_after_icf(self, rng):
        for _ in range(20):
            SW, Sb, xc = canonical_layer(rng, 30, 12)
            for i in range(30):
                assert is_valid_subset(SW[i], Sb[i], xc)


class TestValidPartition:
    def test_identical_neurons_merge(self):
        part = valid_partition(np.array([[-1.0, 2.0], [-1.0, 2.0]]), np.array([-3.0, -3.0]), np.array([1.0, 1.0]))
        assert part.groups == ((0, 1),)

    def test_not_canonical_raises(self):
        with pytest.raises(PartitionError, match="inactive canonical form"):
            valid_partition(np.eye(2), np.array([-1.0, -1.0]), np.array([2.0, 2.0]))

    def test_boundary_merge(self):
        part = valid_partition(-np.eye(2), np.zeros(2), np.ones(2))
        assert part.groups == ((0, 1),)
        assert part.merged_weights.tolist() == [[0.0, 0.0]]
        assert part.merged_biases.tolist() == [0.0]

    def test_no_merge_possible(self):
        # singletons sit at -5.5, any pair at +0.5
        SW = np.array([[1.0, -5.0, -5.0], [-5.0, 1.0, -5.0], [-5.0, -5.0, 1.0]])
        part = valid_partition(SW, np.full(3, 3.5), np.ones(3))
        assert part.h == 3
        assert part.candidates == 3

    def test_matches_reference_loop(self, rng):
        for trial in range(40):
            n = int(rng.integers(1, 40))
            SW, Sb, xc = canonical_layer(rng, n, int(rng.integers(1, 10)))
            part = valid_partition(SW, Sb, xc)
            groups, count = reference_partition(SW, Sb, xc)
            assert [list(g) for g in part.groups] == groups
            assert part.candidates == count

    def test_invariants(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 60))
            SW, Sb, xc = canonical_layer(rng, n, 8)
            part = valid_partition(SW, Sb, xc)
            check_partition(part, n, xc)
            assert sorted(i for g in part.groups for i in g) == list(range(n))
            assert part.h <= n
            assert part.candidates <= n * (n - 1) // 2
            firsts = [g[0] for g in part.groups]
            assert firsts == sorted(firsts)
            for g, V, u in zip(part.groups, part.merged_weights, part.merged_biases):
                V_ref, u_ref = merged_upper_params(SW, Sb, g)
                assert np.array_equal(V, V_ref) and u == u_ref
                assert is_valid_subset(V, u, xc)

    def test_deterministic(self, rng):
        SW, Sb, xc = canonical_layer(rng, 50, 10)
        a = valid_partition(SW, Sb, xc)
        b = valid_partition(SW.copy(), Sb.copy(), xc.copy())
        assert a.groups == b.groups
        assert np.array_equal(a.merged_weights, b.merged_weights)
        assert np.array_equal(a.merged_biases, b.merged_biases)

    def test_check_partition_rejects_bad(self, rng):
        SW, Sb, xc = canonical_layer(rng, 10, 4)
        part = valid_partition(SW, Sb, xc)
        broken = type(part)(part.groups[1:], part.merged_weights[1:], part.merged_biases[1:])
        with pytest.raises(PartitionError):
            check_partition(broken, 10, xc)


def test_row_potentials_do_not_depend_on_stacking(rng):
    V = rng.normal(size=(64, 130))
    u = rng.normal(size=64)
    x = np.abs(rng.normal(size=130))
    stacked = potentials(V, u, x)
    for i in range(64):
        assert potentials(V[i], u[i], x)[0] == stacked[i]


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 25), n_in=st.integers(1, 8))
def test_partition_property(seed, n, n_in):
    rng = np.random.default_rng(seed)
    SW, Sb, xc = canonical_layer(rng, n, n_in)
    part = valid_partition(SW, Sb, xc)
    check_partition(part, n, xc)
    assert part.candidates <= n * (n - 1) // 2
    if part.h == n:
        # nothing merged: every pair was tried and rejected
        assert part.candidates == n * (n - 1) // 2
