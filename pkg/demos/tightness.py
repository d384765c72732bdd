"""
Margins near the centroid
=========================

Worst-case output width on hypercube surfaces around a centroid, for the
centroid-exact abstraction, a random merge baseline with the same number of
groups, and plain interval propagation of the whole box.
"""

import numpy as np

from ginnacer import BenchConfig, random_network, run_benchmark

net = random_network([4, 64, 64, 3], seed=0)
xc = np.random.default_rng(1000).normal(size=4)

config = BenchConfig(centroid=xc, deltas=[0.01, 0.1, 1.0, 10.0], samples_per_delta=2000, seed=0, timing=False)
rows = run_benchmark(net, config)

print(f"{'variant':<10}{'delta':>8}{'max margin':>14}{'groups':>8}{'relus':>7}")
for r in rows:
    print(f"{r['variant']:<10}{r['delta']:>8}{r['max_margin']:>14.4g}{r['groups_total']:>8}{r['relus_total']:>7}")

## Ratio of the baseline margin to ours, per delta
for d in config.deltas:
    g = next(r["max_margin"] for r in rows if r["variant"] == "ginnacer" and r["delta"] == d)
    b = next(r["max_margin"] for r in rows if r["variant"] == "baseline" and r["delta"] == d)
    print(f"delta={d}: baseline / ginnacer = {b / g:.3g}")
