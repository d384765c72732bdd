"""Centroid activation patterns, the inactive canonical form, and negative-input pre-layers.

The inactive canonical form (ICF) rewrites a ReLU layer through the identity
``relu(z) = relu(-z) + z`` so that every ReLU is switched off at a chosen
layer input, the centroid:

    r = S (W x + b),   t = A (W x + b),   relu(W x + b) = relu(r) + t

where ``A`` marks neurons active at the centroid and ``S = I - 2A``. Both are
diagonal and stored as vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import Layer, Network, relu, row_potentials


@dataclass(frozen=True)
class LayerCentroid:
    """Centroid bookkeeping for one ReLU layer."""

    active_mask: np.ndarray  # bool, diagonal of A
    sign_vector: np.ndarray  # +-1, diagonal of S
    centroid_in: np.ndarray
    centroid_out: np.ndarray

    @property
    def active(self) -> np.ndarray:
        return self.active_mask.astype(np.float64)


def centroid_activation(W, b, xc) -> tuple[np.ndarray, np.ndarray]:
    """Activation pattern at ``xc``: ``(active_mask, sign_vector)``.

    A pre-activation of exactly zero counts as active.
    """
    W = np.asarray(W, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (W.shape[0],):
        raise ValueError(f"bias shape {b.shape} does not match {W.shape[0]} weight rows")
    pre = row_potentials(W, b, xc)
    active = pre >= 0.0
    sign = 1.0 - 2.0 * active
    return active, sign


def layer_centroid(W, b, xc) -> LayerCentroid:
    xc = np.asarray(xc, dtype=np.float64)
    active, sign = centroid_activation(W, b, xc)
    out = relu(row_potentials(W, b, xc))
    return LayerCentroid(active, sign, xc, out)


CentroidContext = list  # list[LayerCentroid], one entry per ReLU layer


def centroid_context(net: Network, xc) -> list[LayerCentroid]:
    """Propagate ``xc`` through every ReLU layer of ``net``."""
    ctx = []
    x = np.asarray(xc, dtype=np.float64)
    if x.shape != (net.input_dim,):
        raise ValueError(f"centroid has shape {x.shape}, expected ({net.input_dim},)")
    for layer in net.hidden_layers:
        entry = layer_centroid(layer.weights, layer.bias, x)
        ctx.append(entry)
        x = entry.centroid_out
    return ctx


def icf_parts(W, b, ctx: LayerCentroid, x) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(r, t)`` of the canonical form for input ``x`` (single or batched)."""
    x = np.asarray(x, dtype=np.float64)
    W = np.asarray(W, dtype=np.float64)
    if x.shape[-1] != W.shape[1]:
        raise ValueError(f"input has dimension {x.shape[-1]}, expected {W.shape[1]}")
    if ctx.sign_vector.shape[0] != W.shape[0]:
        raise ValueError("centroid context does not match layer size")
    y = x @ W.T + b
    return ctx.sign_vector * y, ctx.active * y


def icf_eval(W, b, ctx: LayerCentroid, x) -> np.ndarray:
    r, t = icf_parts(W, b, ctx, x)
    return relu(r) + t


def build_pre_layers(net: Network) -> Network:
    """Prepend the lossless layer ``x -> (relu(x), relu(-x))``.

    The first hidden layer becomes ``[W, -W]`` so the network computes the
    same function while every later layer sees nonnegative inputs.
    """
    if net.num_relu_layers < 1:
        raise ValueError("pre-layer transform needs at least one ReLU layer")
    n0 = net.input_dim
    eye = np.eye(n0)
    pre = Layer(np.vstack([eye, -eye]), np.zeros(2 * n0), True)
    first = net.layers[0]
    modified = Layer(np.hstack([first.weights, -first.weights]), first.bias, first.relu)
    return Network((pre, modified) + net.layers[1:])
