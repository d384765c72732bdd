import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ginnacer.network import (
    IntervalVector,
    Network,
    NetworkFormatError,
    affine_interval_map,
    forward,
    interval_forward,
    load_network,
    random_network,
    save_network,
)

from conftest import random_nets


def write_json(path, doc):
    path.write_text(json.dumps(doc))
    return path


class TestLoad:
    def test_identity_network(self, tmp_path):
        p = write_json(tmp_path / "n.json", {"layers": [{"weights": [[1]], "bias": [0], "relu": False}]})
        net = load_network(p)
        assert len(net.layers) == 1
        assert net.input_dim == 1 and net.output_dim == 1
        assert net.num_relu_layers == 0

    def test_dimension_mismatch_names_layer(self, tmp_path):
        doc = {
            "layers": [
                {"weights": np.ones((3, 2)).tolist(), "bias": [0, 0, 0], "relu": True},
                {"weights": np.ones((1, 4)).tolist(), "bias": [0], "relu": False},
            ]
        }
        with pytest.raises(NetworkFormatError) as exc:
            load_network(write_json(tmp_path / "n.json", doc))
        assert exc.value.layer == 2
        assert "layer 2" in str(exc.value)

    def test_non_numeric_token(self, tmp_path):
        doc = {"layers": [{"weights": [[1, "x"]], "bias": [0], "relu": False}]}
        with pytest.raises(NetworkFormatError) as exc:
            load_network(write_json(tmp_path / "n.json", doc))
        assert exc.value.layer == 1

    def test_raw_garbage_is_parse_error(self, tmp_path):
        p = tmp_path / "n.json"
        p.write_text('{"layers": [{"weights": [[1, abc]], "bias": [0], "relu": false}]}')
        with pytest.raises(NetworkFormatError):
            load_network(p)

    @pytest.mark.parametrize("bad", ["NaN", "Infinity", "-Infinity"])
    def test_non_finite(self, tmp_path, bad):
        p = tmp_path / "n.json"
        p.write_text('{"layers": [{"weights": [[%s]], "bias": [0], "relu": false}]}' % bad)
        with pytest.raises(NetworkFormatError, match="non-finite") as exc:
            load_network(p)
        assert exc.value.layer == 1

    def test_last_layer_must_be_linear(self, tmp_path):
        doc = {"layers": [{"weights": [[1]], "bias": [0], "relu": True}]}
        with pytest.raises(NetworkFormatError, match="final layer"):
            load_network(write_json(tmp_path / "n.json", doc))

    def test_bias_length(self):
        with pytest.raises(NetworkFormatError, match="bias length"):
            Network.from_arrays([np.ones((2, 2))], [np.zeros(3)])

    def test_round_trip_is_exact(self, tmp_path):
        net = random_network([3, 7, 5, 2], seed=4)
        save_network(net, tmp_path / "a.json")
        back = load_network(tmp_path / "a.json")
        for a, b in zip(net.layers, back.layers):
            assert np.array_equal(a.weights, b.weights)
            assert np.array_equal(a.bias, b.bias)
            assert a.relu == b.relu

    def test_network_is_immutable(self):
        net = random_network([2, 3, 1], seed=0)
        with pytest.raises(ValueError):
            net.layers[0].weights[0, 0] = 1.0


class TestForward:
    def test_hand_example(self, tiny_net):
        assert forward(tiny_net, [3.0]).tolist() == [5.0]

    def test_relu_clips(self, tiny_net):
        assert forward(tiny_net, [0.0]).tolist() == [0.0]

    def test_batch_matches_single(self):
        net = random_network([3, 8, 8, 2], seed=1)
        X = np.random.default_rng(0).normal(size=(20, 3))
        batch = forward(net, X)
        for x, y in zip(X, batch):
            np.testing.assert_allclose(forward(net, x), y, rtol=0, atol=1e-12)

    def test_dimension_mismatch(self, tiny_net):
        with pytest.raises(ValueError):
            forward(tiny_net, [1.0, 2.0])


class TestAffineIntervalMap:
    def test_corner_enumeration(self):
        W = np.array([[2.0, -1.0]])
        b = np.array([-5.0])
        out = affine_interval_map(W, b, IntervalVector([0.0, 0.0], [1.0, 1.0]))
        corners = [W @ np.array(c) + b for c in itertools.product([0.0, 1.0], repeat=2)]
        assert out.lower[0] == min(corners)[0] == -6.0
        assert out.upper[0] == max(corners)[0] == -3.0

    def test_corner_oracle_random(self, rng):
        # the box image of an affine map is attained at corners
        for _ in range(50):
            d = int(rng.integers(1, 5))
            W = rng.normal(size=(3, d))
            b = rng.normal(size=3)
            lo = rng.normal(size=d)
            hi = lo + rng.uniform(0, 2, size=d)
            vals = np.array([W @ np.where(mask, hi, lo) + b for mask in itertools.product([0, 1], repeat=d)])
            out = affine_interval_map(W, b, IntervalVector(lo, hi))
            np.testing.assert_allclose(out.lower, vals.min(axis=0), atol=1e-12)
            np.testing.assert_allclose(out.upper, vals.max(axis=0), atol=1e-12)

    def test_identity(self, rng):
        box = IntervalVector(rng.normal(size=4) - 1, rng.normal(size=4) + 1.5)
        box = IntervalVector(np.minimum(box.lower, box.upper), np.maximum(box.lower, box.upper))
        out = affine_interval_map(np.eye(4), np.zeros(4), box)
        assert np.array_equal(out.lower, box.lower) and np.array_equal(out.upper, box.upper)

    def test_degenerate(self, rng):
        for _ in range(100):
            W = rng.normal(size=(5, 3)) * 10
            b = rng.normal(size=5)
            x = rng.normal(size=3) * 10
            out = affine_interval_map(W, b, IntervalVector.point(x))
            assert np.array_equal(out.lower, out.upper)
            np.testing.assert_allclose(out.lower, W @ x + b, rtol=0, atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            affine_interval_map(np.ones((2, 3)), np.zeros(2), IntervalVector.point(np.zeros(2)))


class TestIntervalForward:
    def test_single_relu(self):
        net = Network.from_arrays([[[1.0]], [[1.0]]], [[0.0], [0.0]])
        out = interval_forward(net, IntervalVector([-2.0], [3.0]))
        assert out.lower.tolist() == [0.0] and out.upper.tolist() == [3.0]

    def test_degenerate_matches_forward(self):
        net = random_network([3, 10, 10, 2], seed=2)
        x = np.array([0.3, -1.2, 4.0])
        out = interval_forward(net, IntervalVector.point(x))
        assert np.array_equal(out.lower, out.upper)
        np.testing.assert_allclose(out.lower, forward(net, x), atol=1e-12)

    def test_sampled_containment(self, rng):
        for net in random_nets(10, seed=3):
            lo = rng.uniform(-3, 0, size=net.input_dim)
            box = IntervalVector(lo, lo + rng.uniform(0, 3, size=net.input_dim))
            out = interval_forward(net, box)
            X = rng.uniform(box.lower, box.upper, size=(1000, net.input_dim))
            assert np.all(out.contains(forward(net, X), atol=1e-9))


@settings(max_examples=60, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    shrink=st.floats(0.0, 1.0),
    shift=st.floats(0.0, 1.0),
)
def test_inclusion_isotone(seed, shrink, shift):
    rng = np.random.default_rng(seed)
    net = random_network([3, 6, 6, 2], seed=seed)
    lo = rng.uniform(-5, 5, size=3)
    hi = lo + rng.uniform(0, 4, size=3)
    width = (hi - lo) * shrink
    inner_lo = lo + (hi - lo - width) * shift
    outer = interval_forward(net, IntervalVector(lo, hi))
    inner = interval_forward(net, IntervalVector(inner_lo, np.minimum(inner_lo + width, hi)))
    assert inner.issubset(outer)
