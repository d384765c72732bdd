"""Global interval abstraction with exact reconstruction at a centroid.

Each abstracted ReLU layer keeps two affine maps built at a centroid:

* ``AW, Ab``: the rows of ``W, b`` for neurons active at the centroid (zero
  elsewhere). Their image is a lower bound on the layer output.
* ``V, u``: one row per neuron group, the elementwise max of the sign-flipped
  rows of the group. ``relu(V x + u)`` is an upper bound on the part of the
  output the lower bound misses, and it vanishes at the centroid.

Interval inputs are propagated by splitting every matrix into its positive and
negative parts. The upper bound of a neuron is the shared ReLU of its group,
broadcast back, plus the upper image of ``AW, Ab``.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, NamedTuple

import numpy as np

from .icf import build_pre_layers, layer_centroid
from .network import (
    IntervalVector,
    Layer,
    Network,
    affine_interval_map,
    relu,
    row_potentials,
    split_signs,
)
from .partition import Partition, PartitionError, check_partition, valid_partition

NegInput = Literal["on", "off", "auto"]


class AbstractionError(ValueError):
    """An abstraction document or object violates a structural invariant."""


@dataclass(frozen=True, eq=False)
class LayerAbstraction:
    group_index: np.ndarray  # (n,) group of each neuron, 0-based
    V: np.ndarray  # (h, n_in)
    u: np.ndarray  # (h,)
    AW: np.ndarray  # (n, n_in)
    Ab: np.ndarray  # (n,)
    _splits: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("V", "u", "AW", "Ab"):
            arr = np.array(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        gi = np.array(self.group_index, dtype=np.int64)
        gi.setflags(write=False)
        object.__setattr__(self, "group_index", gi)
        h, n_in = self.V.shape
        n = self.AW.shape[0]
        if self.u.shape != (h,) or self.AW.shape != (n, n_in) or self.Ab.shape != (n,) or gi.shape != (n,):
            raise AbstractionError("inconsistent layer abstraction shapes")
        if n and (gi.min() < 0 or gi.max() >= h or np.unique(gi).size != h):
            raise AbstractionError("group index must map every neuron to one of h nonempty groups")
        object.__setattr__(self, "_splits", (split_signs(self.V), split_signs(self.AW)))

    @property
    def n(self) -> int:
        return self.AW.shape[0]

    @property
    def h(self) -> int:
        return self.V.shape[0]

    @property
    def n_in(self) -> int:
        return self.AW.shape[1]

    @property
    def groups(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.h)]
        for i, k in enumerate(self.group_index.tolist()):
            out[k].append(i)
        return out

    def propagate(self, lower: np.ndarray, upper: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        (Vp, Vn), (Ap, An) = self._splits
        r_up = upper @ Vp.T + lower @ Vn.T + self.u
        t_up = upper @ Ap.T + lower @ An.T + self.Ab
        t_lo = lower @ Ap.T + upper @ An.T + self.Ab
        return t_lo, relu(r_up)[..., self.group_index] + t_up


@dataclass(frozen=True, eq=False)
class GinnacerAbstraction:
    pre_layer: Layer | None
    exact_layers: tuple[Layer, ...]
    layer_abs: tuple[LayerAbstraction, ...]
    output_layer: Layer
    centroid: np.ndarray
    relu_counts: tuple[tuple[int, int], ...]  # (original n, abstracted h) per ReLU layer

    def __post_init__(self):
        c = np.array(self.centroid, dtype=np.float64)
        c.setflags(write=False)
        object.__setattr__(self, "centroid", c)
        object.__setattr__(self, "exact_layers", tuple(self.exact_layers))
        object.__setattr__(self, "layer_abs", tuple(self.layer_abs))
        object.__setattr__(self, "relu_counts", tuple((int(a), int(b)) for a, b in self.relu_counts))
        self._check_chain()

    def _check_chain(self):
        dim = self.centroid.shape[0]
        if self.pre_layer is not None:
            if self.pre_layer.n_in != dim:
                raise AbstractionError("pre-layer does not match the centroid dimension")
            dim = self.pre_layer.n_out
        for layer in self.exact_layers:
            if layer.n_in != dim:
                raise AbstractionError("exact layers do not chain")
            dim = layer.n_out
        for la in self.layer_abs:
            if la.n_in != dim:
                raise AbstractionError("abstracted layers do not chain")
            dim = la.n
        if self.output_layer.n_in != dim:
            raise AbstractionError("output layer does not chain")
        expected = [(layer.n_out, layer.n_out) for layer in self.exact_layers]
        expected += [(la.n, la.h) for la in self.layer_abs]
        if list(self.relu_counts) != expected:
            raise AbstractionError(f"relu_counts {list(self.relu_counts)} disagree with layers {expected}")

    @property
    def input_dim(self) -> int:
        return self.centroid.shape[0]

    @property
    def exact_prefix(self) -> int:
        return len(self.exact_layers)

    @property
    def original_relus(self) -> int:
        return sum(n for n, _ in self.relu_counts)

    @property
    def abstract_relus(self) -> int:
        """ReLUs used by the abstraction, excluding the optional pre-layer."""
        return sum(h for _, h in self.relu_counts)

    @property
    def pre_layer_relus(self) -> int:
        return 0 if self.pre_layer is None else self.pre_layer.n_out


def _resolve_neg_input(flag, centroid, input_lower) -> bool:
    if isinstance(flag, bool):
        return flag
    if flag == "on":
        return True
    if flag == "off":
        return False
    if flag == "auto":
        if input_lower is None:
            return True
        return not bool(np.all(np.asarray(input_lower, dtype=np.float64) >= 0.0))
    raise ValueError(f"neg_input must be 'on', 'off' or 'auto', got {flag!r}")


def abstract_layer(layer: Layer, xc) -> tuple[LayerAbstraction, Partition, np.ndarray]:
    """Abstract one ReLU layer around its input centroid ``xc``.

    Returns the layer abstraction, the partition it was built from, and the
    next layer's centroid.
    """
    ctx = layer_centroid(layer.weights, layer.bias, xc)
    sign = ctx.sign_vector
    part = valid_partition(sign[:, None] * layer.weights, sign * layer.bias, ctx.centroid_in)
    check_partition(part, layer.n_out, ctx.centroid_in)
    active = ctx.active_mask
    AW = np.where(active[:, None], layer.weights, 0.0)
    Ab = np.where(active, layer.bias, 0.0)
    la = LayerAbstraction(part.group_index(), part.merged_weights, part.merged_biases, AW, Ab)
    return la, part, ctx.centroid_out


def build_ginnacer(
    net: Network,
    xc,
    neg_input: NegInput | bool = "auto",
    skip_layers: int = 0,
    *,
    input_lower=None,
) -> GinnacerAbstraction:
    """Compute abstraction parameters for ``net`` around the input ``xc``.

    ``neg_input`` controls the pre-layer that splits inputs into positive and
    negative parts: ``"auto"`` enables it unless ``input_lower`` shows the input
    domain is nonnegative. With it off the abstraction is only sound for
    nonnegative inputs. ``skip_layers`` leading ReLU layers are kept exact.
    """
    xc = np.asarray(xc, dtype=np.float64)
    if xc.shape != (net.input_dim,):
        raise ValueError(f"centroid has shape {xc.shape}, expected ({net.input_dim},)")
    m = net.num_relu_layers
    if not 0 <= skip_layers <= m:
        raise ValueError(f"skip_layers must lie in [0, {m}], got {skip_layers}")
    use_pre = _resolve_neg_input(neg_input, xc, input_lower) and m > 0
    if not use_pre and np.any(xc < 0):
        warnings.warn(
            "negative-input pre-layer is off but the centroid has negative entries; "
            "the abstraction is only sound on nonnegative inputs",
            stacklevel=2,
        )

    if use_pre:
        work = build_pre_layers(net)
        pre_layer = work.layers[0]
        hidden = work.hidden_layers[1:]
        x = relu(row_potentials(pre_layer.weights, pre_layer.bias, xc))
    else:
        pre_layer = None
        hidden = net.hidden_layers
        x = xc

    exact, abstracted, counts = [], [], []
    for idx, layer in enumerate(hidden):
        if idx < skip_layers:
            exact.append(layer)
            counts.append((layer.n_out, layer.n_out))
            x = relu(row_potentials(layer.weights, layer.bias, x))
            continue
        la, _, x = abstract_layer(layer, x)
        abstracted.append(la)
        counts.append((la.n, la.h))

    return GinnacerAbstraction(pre_layer, tuple(exact), tuple(abstracted), net.output_layer, xc, tuple(counts))


def eval_ginnacer_interval(abs_: GinnacerAbstraction, interval: IntervalVector) -> IntervalVector:
    """Sound output bounds for every input inside ``interval``."""
    if len(interval) != abs_.input_dim:
        raise ValueError(f"input has dimension {len(interval)}, expected {abs_.input_dim}")
    cur = interval
    for layer in ((abs_.pre_layer,) if abs_.pre_layer is not None else ()) + abs_.exact_layers:
        cur = affine_interval_map(layer.weights, layer.bias, cur)
        cur = IntervalVector(relu(cur.lower), relu(cur.upper))
    lo, hi = cur.lower, cur.upper
    for la in abs_.layer_abs:
        lo, hi = la.propagate(lo, hi)
    return affine_interval_map(abs_.output_layer.weights, abs_.output_layer.bias, IntervalVector(lo, hi))


def eval_ginnacer(abs_: GinnacerAbstraction, x) -> IntervalVector:
    """Output bounds for a concrete input ``x`` (shape ``(n0,)`` or ``(N, n0)``)."""
    return eval_ginnacer_interval(abs_, IntervalVector.point(x))


class LayerStats(NamedTuple):
    layer: int  # 0 for the pre-layer, 1..m for ReLU layers
    original: int
    abstracted: int
    percent_remaining: float


def relu_stats(abs_: GinnacerAbstraction) -> list[LayerStats]:
    rows = []
    if abs_.pre_layer is not None:
        n = abs_.pre_layer.n_out
        rows.append(LayerStats(0, n, n, 100.0))
    for idx, (n, h) in enumerate(abs_.relu_counts, start=1):
        rows.append(LayerStats(idx, n, h, 100.0 * h / n))
    return rows


# ---------------------------------------------------------------------------
# JSON documents


def _layer_doc(layer: Layer) -> dict:
    return {"weights": layer.weights.tolist(), "bias": layer.bias.tolist(), "relu": layer.relu}


def _layer_from_doc(doc) -> Layer:
    return Layer(np.array(doc["weights"], dtype=np.float64), np.array(doc["bias"], dtype=np.float64), bool(doc["relu"]))


def abstraction_to_dict(abs_: GinnacerAbstraction) -> dict:
    return {
        "pre_layer": None if abs_.pre_layer is None else _layer_doc(abs_.pre_layer),
        "exact_prefix": abs_.exact_prefix,
        "exact_layers": [_layer_doc(layer) for layer in abs_.exact_layers],
        "layers": [
            {
                "groups": la.groups,
                "V": la.V.tolist(),
                "u": la.u.tolist(),
                "AW": la.AW.tolist(),
                "Ab": la.Ab.tolist(),
            }
            for la in abs_.layer_abs
        ],
        "output_layer": _layer_doc(abs_.output_layer),
        "centroid": abs_.centroid.tolist(),
        "relu_counts": [list(c) for c in abs_.relu_counts],
    }


def abstraction_from_dict(doc: dict) -> GinnacerAbstraction:
    try:
        pre = None if doc["pre_layer"] is None else _layer_from_doc(doc["pre_layer"])
        exact = tuple(_layer_from_doc(d) for d in doc.get("exact_layers", []))
        if len(exact) != doc["exact_prefix"]:
            raise AbstractionError("exact_prefix does not match the number of stored exact layers")
        layers = []
        for k, d in enumerate(doc["layers"], start=1):
            AW = np.array(d["AW"], dtype=np.float64)
            gi = np.full(AW.shape[0], -1, dtype=np.int64)
            for g, members in enumerate(d["groups"]):
                if not members:
                    raise AbstractionError(f"abstracted layer {k}: empty group")
                if np.any(gi[members] >= 0):
                    raise AbstractionError(f"abstracted layer {k}: groups overlap")
                gi[members] = g
            if np.any(gi < 0):
                raise AbstractionError(f"abstracted layer {k}: groups do not cover every neuron")
            layers.append(LayerAbstraction(gi, d["V"], d["u"], AW, d["Ab"]))
        out = _layer_from_doc(doc["output_layer"])
        return GinnacerAbstraction(pre, exact, tuple(layers), out, doc["centroid"], doc["relu_counts"])
    except (KeyError, TypeError, IndexError) as exc:
        raise AbstractionError(f"malformed abstraction document: {exc!r}") from None


def verify_abstraction(abs_: GinnacerAbstraction, tol: float = 1e-9) -> None:
    """Re-check the stored parameters against their defining invariants.

    The layer centroids are recomputed from the stored rows (``AW x + Ab``
    equals the layer output at the centroid), every group must have a
    nonpositive merged potential there, and the abstraction evaluated at the
    centroid must collapse to width at most ``tol``.
    """
    x = abs_.centroid
    if abs_.pre_layer is not None:
        x = relu(row_potentials(abs_.pre_layer.weights, abs_.pre_layer.bias, x))
    for layer in abs_.exact_layers:
        x = relu(row_potentials(layer.weights, layer.bias, x))
    for k, la in enumerate(abs_.layer_abs, start=1):
        part = Partition(tuple(tuple(g) for g in la.groups), la.V, la.u)
        try:
            check_partition(part, la.n, x)
        except PartitionError as exc:
            raise AbstractionError(f"abstracted layer {k}: {exc}") from None
        x = relu(row_potentials(la.AW, la.Ab, x))
    out = eval_ginnacer(abs_, abs_.centroid)
    if np.max(out.width, initial=0.0) > tol:
        raise AbstractionError(f"bounds at the centroid have width {np.max(out.width):.3e} > {tol:g}")


def save_abstraction(abs_: GinnacerAbstraction, path) -> None:
    Path(path).write_text(json.dumps(abstraction_to_dict(abs_)) + "\n")


def load_abstraction(path) -> GinnacerAbstraction:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise AbstractionError(f"invalid JSON: {exc}") from None
    return abstraction_from_dict(doc)
