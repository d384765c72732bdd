"""
Keeping leading layers exact
============================

Skipping the first k ReLU layers keeps them exact and abstracts only the
rest. Margins shrink and the ReLU count grows as k increases; skipping every
layer recovers the network itself.
"""

import numpy as np

from ginnacer import IntervalVector, build_ginnacer, eval_ginnacer_interval, random_network, sample_hypercube_surface
from ginnacer.bench import max_margin

net = random_network([4, 64, 64, 64, 3], seed=3)
xc = np.random.default_rng(3).normal(size=4)

for delta in (0.1, 1.0):
    pts = sample_hypercube_surface(xc, delta, 2000, seed=1)
    print(f"delta = {delta}")
    for k in range(net.num_relu_layers + 1):
        abs_ = build_ginnacer(net, xc, skip_layers=k)
        box = eval_ginnacer_interval(abs_, IntervalVector.box(xc, delta))
        print(
            f"  skip {k}: ReLUs {abs_.abstract_relus:4d} of {abs_.original_relus}"
            f"  surface margin {max_margin(abs_, pts):10.4g}  whole-box margin {np.max(box.width):10.4g}"
        )
