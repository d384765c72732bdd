"""Centroid-agnostic merge abstraction used as a comparison point.

Neurons of a layer are merged at random into groups. Each group keeps the
elementwise max of its rows (weights and bias) and the elementwise min. On
nonnegative inputs every member's pre-activation lies between the two merged
affine forms, so the group's two ReLUs bound every member.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .icf import build_pre_layers
from .network import IntervalVector, Layer, Network, affine_interval_map, relu, split_signs


@dataclass(frozen=True, eq=False)
class MergedLayer:
    groups: tuple[tuple[int, ...], ...]
    W_max: np.ndarray  # (g, n_in)
    b_max: np.ndarray
    W_min: np.ndarray
    b_min: np.ndarray

    @property
    def n(self) -> int:
        return sum(len(g) for g in self.groups)

    @property
    def num_groups(self) -> int:
        return len(self.groups)

    @property
    def num_relus(self) -> int:
        # a singleton needs one ReLU, a merged group needs an upper and a lower one
        return sum(1 if len(g) == 1 else 2 for g in self.groups)

    def group_index(self) -> np.ndarray:
        idx = np.empty(self.n, dtype=np.int64)
        for k, g in enumerate(self.groups):
            idx[list(g)] = k
        return idx

    def propagate(self, lower, upper):
        # inputs are post-ReLU (or pre-layer) values, hence lower >= 0
        gi = self.group_index()
        pmax, nmax = split_signs(self.W_max)
        pmin, nmin = split_signs(self.W_min)
        hi = relu(upper @ pmax.T + lower @ nmax.T + self.b_max)
        lo = relu(lower @ pmin.T + upper @ nmin.T + self.b_min)
        return lo[..., gi], hi[..., gi]


@dataclass(frozen=True, eq=False)
class MergeBaseline:
    pre_layer: Layer | None
    layers: tuple[MergedLayer, ...]
    output_layer: Layer

    @property
    def input_dim(self) -> int:
        if self.pre_layer is not None:
            return self.pre_layer.n_in
        return self.layers[0].W_max.shape[1] if self.layers else self.output_layer.n_in

    @property
    def group_counts(self) -> list[int]:
        return [layer.num_groups for layer in self.layers]

    @property
    def relu_counts(self) -> list[int]:
        return [layer.num_relus for layer in self.layers]


def random_groups(n: int, target: int, rng: np.random.Generator) -> tuple[tuple[int, ...], ...]:
    """Merge random pairs of groups, starting from singletons, until ``target`` remain."""
    if target < 1:
        raise ValueError(f"target group count must be at least 1, got {target}")
    groups = [[i] for i in range(n)]
    while len(groups) > target:
        a, b = sorted(rng.choice(len(groups), size=2, replace=False).tolist())
        groups[a].extend(groups.pop(b))
    return tuple(sorted(tuple(sorted(g)) for g in groups))


def merge_layer(layer: Layer, groups) -> MergedLayer:
    W, b = layer.weights, layer.bias
    return MergedLayer(
        tuple(tuple(g) for g in groups),
        np.stack([W[list(g)].max(axis=0) for g in groups]),
        np.array([b[list(g)].max() for g in groups]),
        np.stack([W[list(g)].min(axis=0) for g in groups]),
        np.array([b[list(g)].min() for g in groups]),
    )


def build_merge_baseline(
    net: Network, target_counts: Sequence[int] | None = None, seed=0, *, pre_layer: bool = True
) -> MergeBaseline:
    """Randomly merge each ReLU layer of ``net`` down to ``target_counts`` groups.

    Targets above a layer's width leave it unmerged. ``target_counts=None``
    merges nothing. The pre-layer makes all merged layers see nonnegative
    inputs; disable it only for networks whose inputs are nonnegative.
    """
    m = net.num_relu_layers
    if target_counts is None:
        target_counts = [layer.n_out for layer in net.hidden_layers]
    target_counts = list(target_counts)
    if len(target_counts) != m:
        raise ValueError(f"expected {m} target counts, got {len(target_counts)}")
    rng = np.random.default_rng(seed)
    if pre_layer and m > 0:
        work = build_pre_layers(net)
        pre, hidden = work.layers[0], work.hidden_layers[1:]
    else:
        pre, hidden = None, net.hidden_layers
    merged = []
    for layer, target in zip(hidden, target_counts):
        merged.append(merge_layer(layer, random_groups(layer.n_out, min(int(target), layer.n_out), rng)))
    return MergeBaseline(pre, tuple(merged), net.output_layer)


def eval_merge_baseline_interval(bl: MergeBaseline, interval: IntervalVector) -> IntervalVector:
    if len(interval) != bl.input_dim:
        raise ValueError(f"input has dimension {len(interval)}, expected {bl.input_dim}")
    lo, hi = interval.lower, interval.upper
    if bl.pre_layer is not None:
        cur = affine_interval_map(bl.pre_layer.weights, bl.pre_layer.bias, interval)
        lo, hi = relu(cur.lower), relu(cur.upper)
    for layer in bl.layers:
        lo, hi = layer.propagate(lo, hi)
    return affine_interval_map(bl.output_layer.weights, bl.output_layer.bias, IntervalVector(lo, hi))


def eval_merge_baseline(bl: MergeBaseline, x) -> IntervalVector:
    return eval_merge_baseline_interval(bl, IntervalVector.point(x))


def baseline_to_dict(bl: MergeBaseline) -> dict:
    def layer_doc(layer: Layer) -> dict:
        return {"weights": layer.weights.tolist(), "bias": layer.bias.tolist(), "relu": layer.relu}

    return {
        "pre_layer": None if bl.pre_layer is None else layer_doc(bl.pre_layer),
        "layers": [
            {
                "groups": [list(g) for g in layer.groups],
                "W_max": layer.W_max.tolist(),
                "b_max": layer.b_max.tolist(),
                "W_min": layer.W_min.tolist(),
                "b_min": layer.b_min.tolist(),
            }
            for layer in bl.layers
        ],
        "output_layer": layer_doc(bl.output_layer),
        "group_counts": bl.group_counts,
        "relu_counts": bl.relu_counts,
    }


def baseline_from_dict(doc: dict) -> MergeBaseline:
    def layer(d) -> Layer:
        return Layer(np.array(d["weights"], dtype=np.float64), np.array(d["bias"], dtype=np.float64), bool(d["relu"]))

    pre = None if doc["pre_layer"] is None else layer(doc["pre_layer"])
    merged = tuple(
        MergedLayer(
            tuple(tuple(g) for g in d["groups"]),
            np.array(d["W_max"], dtype=np.float64),
            np.array(d["b_max"], dtype=np.float64),
            np.array(d["W_min"], dtype=np.float64),
            np.array(d["b_min"], dtype=np.float64),
        )
        for d in doc["layers"]
    )
    return MergeBaseline(pre, merged, layer(doc["output_layer"]))
