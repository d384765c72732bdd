"""Feedforward ReLU networks: representation, JSON I/O, point and interval evaluation.

A network is a chain of affine layers. Every layer except the last applies an
elementwise ReLU; the final layer is linear. Evaluation functions accept either
a single input vector of shape ``(n0,)`` or a batch of shape ``(N, n0)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np


class NetworkFormatError(ValueError):
    """Raised when a network description is malformed.

    ``layer`` holds the 1-based index of the offending layer, or ``None`` when
    the problem is not tied to a single layer.
    """

    def __init__(self, message: str, layer: int | None = None):
        if layer is not None:
            message = f"layer {layer}: {message}"
        super().__init__(message)
        self.layer = layer


def relu(z):
    return np.maximum(z, 0.0)


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Layer:
    weights: np.ndarray  # (n_out, n_in)
    bias: np.ndarray  # (n_out,)
    relu: bool

    def __post_init__(self):
        object.__setattr__(self, "weights", _frozen(self.weights))
        object.__setattr__(self, "bias", _frozen(self.bias))

    @property
    def n_in(self) -> int:
        return self.weights.shape[1]

    @property
    def n_out(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class Network:
    """Immutable feedforward network; ``layers[-1]`` is the linear output layer."""

    layers: tuple[Layer, ...]

    def __post_init__(self):
        layers = tuple(self.layers)
        object.__setattr__(self, "layers", layers)
        _validate_layers(layers)

    @classmethod
    def from_arrays(cls, weights: Sequence, biases: Sequence) -> "Network":
        """Build a network with ReLU on every layer but the last."""
        if len(weights) != len(biases):
            raise NetworkFormatError("got different numbers of weight matrices and bias vectors")
        m = len(weights)
        return cls(tuple(Layer(w, b, i < m - 1) for i, (w, b) in enumerate(zip(weights, biases))))

    @property
    def input_dim(self) -> int:
        return self.layers[0].n_in

    @property
    def output_dim(self) -> int:
        return self.layers[-1].n_out

    @property
    def relu_mask(self) -> tuple[bool, ...]:
        return tuple(layer.relu for layer in self.layers)

    @property
    def hidden_layers(self) -> tuple[Layer, ...]:
        return self.layers[:-1]

    @property
    def output_layer(self) -> Layer:
        return self.layers[-1]

    @property
    def num_relu_layers(self) -> int:
        return len(self.layers) - 1

    @property
    def num_relus(self) -> int:
        return sum(layer.n_out for layer in self.hidden_layers)


def _validate_layers(layers: tuple[Layer, ...]) -> None:
    if not layers:
        raise NetworkFormatError("network must contain at least one layer")
    for idx, layer in enumerate(layers, start=1):
        if layer.weights.ndim != 2:
            raise NetworkFormatError("weights must be a 2-D matrix", idx)
        if layer.bias.ndim != 1:
            raise NetworkFormatError("bias must be a vector", idx)
        if layer.bias.shape[0] != layer.weights.shape[0]:
            raise NetworkFormatError(
                f"bias length {layer.bias.shape[0]} does not match {layer.weights.shape[0]} weight rows", idx
            )
        if layer.weights.shape[0] == 0 or layer.weights.shape[1] == 0:
            raise NetworkFormatError("layer has a zero dimension", idx)
        if not (np.all(np.isfinite(layer.weights)) and np.all(np.isfinite(layer.bias))):
            raise NetworkFormatError("non-finite value in weights or bias", idx)
        if idx > 1 and layer.n_in != layers[idx - 2].n_out:
            raise NetworkFormatError(
                f"dimension mismatch: expects {layer.n_in} inputs but layer {idx - 1} "
                f"produces {layers[idx - 2].n_out}",
                idx,
            )
        last = idx == len(layers)
        if last and layer.relu:
            raise NetworkFormatError("the final layer must be linear (relu=false)", idx)
        if not last and not layer.relu:
            raise NetworkFormatError("hidden layers must apply ReLU (relu=true)", idx)


# ---------------------------------------------------------------------------
# JSON I/O


def network_from_dict(doc) -> Network:
    if not isinstance(doc, dict) or not isinstance(doc.get("layers"), list):
        raise NetworkFormatError('expected an object with a "layers" list')
    layers = []
    for idx, entry in enumerate(doc["layers"], start=1):
        if not isinstance(entry, dict):
            raise NetworkFormatError("layer entry must be an object", idx)
        try:
            w = _numeric_array(entry["weights"], 2)
            b = _numeric_array(entry["bias"], 1)
            r = entry["relu"]
        except KeyError as exc:
            raise NetworkFormatError(f"missing field {exc.args[0]!r}", idx) from None
        except (TypeError, ValueError) as exc:
            raise NetworkFormatError(f"could not parse numbers: {exc}", idx) from None
        if not isinstance(r, bool):
            raise NetworkFormatError('"relu" must be a boolean', idx)
        layers.append(Layer(w, b, r))
    return Network(tuple(layers))


def _numeric_array(value, ndim: int) -> np.ndarray:
    def check(v):
        # bool is a subclass of int; JSON true/false are not weights
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise TypeError(f"non-numeric entry {v!r}")

    if ndim == 1:
        if not isinstance(value, list):
            raise TypeError("expected a list")
        for v in value:
            check(v)
        return np.array(value, dtype=np.float64).reshape(len(value))
    if not isinstance(value, list) or not all(isinstance(row, list) for row in value):
        raise TypeError("expected a list of rows")
    widths = {len(row) for row in value}
    if len(widths) > 1:
        raise ValueError("ragged weight matrix")
    for row in value:
        for v in row:
            check(v)
    return np.array(value, dtype=np.float64).reshape(len(value), widths.pop() if widths else 0)


def network_to_dict(net: Network) -> dict:
    return {
        "layers": [
            {"weights": layer.weights.tolist(), "bias": layer.bias.tolist(), "relu": layer.relu}
            for layer in net.layers
        ]
    }


def load_network(path) -> Network:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkFormatError(f"invalid JSON: {exc}") from None
    return network_from_dict(doc)


def save_network(net: Network, path) -> None:
    # repr() of a double is the shortest string that round-trips exactly
    Path(path).write_text(json.dumps(network_to_dict(net)) + "\n")


# ---------------------------------------------------------------------------
# Evaluation


@dataclass(frozen=True)
class IntervalVector:
    """Elementwise bounds ``lower <= upper``; may carry a leading batch axis."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=np.float64)
        hi = np.asarray(self.upper, dtype=np.float64)
        if lo.shape != hi.shape:
            raise ValueError(f"bound shapes differ: {lo.shape} vs {hi.shape}")
        if np.any(lo > hi):
            raise ValueError("interval has lower > upper")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def point(cls, x) -> "IntervalVector":
        x = np.asarray(x, dtype=np.float64)
        return cls(x, x.copy())

    @classmethod
    def box(cls, center, radius) -> "IntervalVector":
        center = np.asarray(center, dtype=np.float64)
        return cls(center - radius, center + radius)

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def __len__(self):
        return self.lower.shape[-1]

    def contains(self, x, atol: float = 0.0) -> np.ndarray:
        """Elementwise membership test with absolute slack ``atol``."""
        x = np.asarray(x)
        return (x >= self.lower - atol) & (x <= self.upper + atol)

    def issubset(self, other: "IntervalVector") -> bool:
        return bool(np.all(self.lower >= other.lower) and np.all(self.upper <= other.upper))


def _check_dim(actual: int, expected: int, what: str = "input") -> None:
    if actual != expected:
        raise ValueError(f"{what} has dimension {actual}, expected {expected}")


def forward(net: Network, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    _check_dim(x.shape[-1], net.input_dim)
    for layer in net.layers:
        x = x @ layer.weights.T + layer.bias
        if layer.relu:
            x = relu(x)
    return x


def row_potentials(W, b, x) -> np.ndarray:
    """``W @ x + b`` for a single vector ``x``, one row at a time.

    Every row is reduced by the same code path whatever the number of rows, so
    a row evaluated alone or stacked with others yields bit-identical results.
    Validity decisions (signs at a centroid) must all go through here.
    """
    W = np.asarray(W, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    _check_dim(x.shape[0], W.shape[-1])
    return np.multiply(W, x).sum(axis=-1) + b


def split_signs(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(max(M, 0), min(M, 0))`` elementwise."""
    return np.maximum(M, 0.0), np.minimum(M, 0.0)


def affine_interval_map(W, b, interval: IntervalVector, *, splits=None) -> IntervalVector:
    """Sound image of a box under ``x -> W x + b``.

    ``splits`` may supply a precomputed ``split_signs(W)``.
    """
    W = np.asarray(W, dtype=np.float64)
    _check_dim(len(interval), W.shape[1])
    pos, neg = splits if splits is not None else split_signs(W)
    lo, hi = interval.lower, interval.upper
    upper = hi @ pos.T + lo @ neg.T + b
    lower = lo @ pos.T + hi @ neg.T + b
    # no shortcut for degenerate boxes: points and boxes share one rounding path,
    # which keeps the map inclusion-isotone in floating point
    return IntervalVector(lower, upper)


def interval_forward(net: Network, interval: IntervalVector) -> IntervalVector:
    """Naive interval bound propagation through the whole network."""
    _check_dim(len(interval), net.input_dim)
    out = interval
    for layer in net.layers:
        out = affine_interval_map(layer.weights, layer.bias, out)
        if layer.relu:
            out = IntervalVector(relu(out.lower), relu(out.upper))
    return out


# ---------------------------------------------------------------------------
# Random networks for tests, demos and benchmarks


def random_network(sizes: Sequence[int], seed=None, *, scale: str = "he") -> Network:
    """Gaussian network with layer widths ``sizes = [n0, n1, ..., n_out]``.

    ``scale="he"`` uses std ``sqrt(2 / fan_in)``; ``scale="unit"`` uses std 1.
    Biases are drawn with std 0.1 times the weight std.
    """
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for n_in, n_out in zip(sizes[:-1], sizes[1:]):
        std = math.sqrt(2.0 / n_in) if scale == "he" else 1.0
        weights.append(rng.normal(0.0, std, size=(n_out, n_in)))
        biases.append(rng.normal(0.0, 0.1 * std, size=n_out))
    return Network.from_arrays(weights, biases)
