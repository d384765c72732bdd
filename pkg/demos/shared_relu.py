"""
Two neurons, one shared ReLU
============================

A single hidden layer with two neurons, both inactive at the origin. Both
fit in one group, so the abstraction keeps one ReLU for the pair and gives
every neuron the same upper bound.
"""

import numpy as np

from ginnacer import Network, build_ginnacer, eval_ginnacer, forward, relu_stats

## The network: relu(x1 + 2 x2 - 1), relu(2 x1 + x2 - 1), identity output
net = Network.from_arrays(
    [[[1.0, 2.0],
      [2.0, 1.0]], np.eye(2)],
    [[-1.0, -1.0], [0.0, 0.0]],
)

## Abstract around the origin. Inputs are taken nonnegative, so no pre-layer.
abs_ = build_ginnacer(net, [0.0, 0.0], neg_input="off")
(layer,) = abs_.layer_abs
print("groups:", layer.groups)
print("shared upper row V =", layer.V[0], " u =", layer.u[0])
for row in relu_stats(abs_):
    print(f"layer {row.layer}: {row.abstracted} of {row.original} ReLUs")

## Exact at the centroid, an interval elsewhere
for x in ([0.0, 0.0], [0.2, 0.2], [1.0, 0.0], [1.0, 1.0]):
    out = eval_ginnacer(abs_, x)
    print(f"x={x}  true={forward(net, np.array(x))}  lower={out.lower}  upper={out.upper}")
