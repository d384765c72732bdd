"""
A one-dimensional regression network
====================================

Fit a small ReLU network to the rational polynomial samples, then abstract
it around x = 0 and watch the output interval open up away from that point.
The hidden layer is random and only the output layer is fitted (least
squares), which is enough for a picture of the bounds.
"""

import numpy as np

from ginnacer import Network, build_ginnacer, eval_ginnacer, forward, sample_polynomial

## Data
pts = sample_polynomial()
x, y = pts[:, :1], pts[:, 1]
print(f"{len(pts)} samples, y in [{y.min():.3f}, {y.max():.3f}]")

## Random hidden layer with kinks spread over [-10, 10], fitted output layer
rng = np.random.default_rng(0)
W1 = rng.choice([-1.0, 1.0], size=(48, 1))
b1 = -W1[:, 0] * rng.uniform(-10, 10, size=48)
H = np.maximum(x @ W1.T + b1, 0)
coef, *_ = np.linalg.lstsq(np.c_[H, np.ones(len(H))], y, rcond=None)
net = Network.from_arrays([W1, coef[None, :-1]], [b1, coef[-1:]])
print("fit rmse:", np.sqrt(np.mean((forward(net, x)[:, 0] - y) ** 2)))

## Abstraction around the origin
abs_ = build_ginnacer(net, [0.0])
print("ReLUs per layer (original, abstracted):", abs_.relu_counts)

## Bounds along the axis
for xv in (0.0, 0.5, 1.0, 2.0, 5.0, -5.0, 10.0):
    out = eval_ginnacer(abs_, [xv])
    f = forward(net, np.array([xv]))[0]
    print(f"x={xv:6.1f}  f={f:8.4f}  bounds=[{out.lower[0]:9.4f}, {out.upper[0]:9.4f}]")
