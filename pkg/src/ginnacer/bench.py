"""Measurement protocol: surface sampling around a centroid, worst-case margins, CSV output."""

from __future__ import annotations

import csv
import io
import statistics
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .abstraction import GinnacerAbstraction, build_ginnacer, eval_ginnacer, eval_ginnacer_interval
from .baseline import MergeBaseline, build_merge_baseline, eval_merge_baseline, eval_merge_baseline_interval
from .network import IntervalVector, Network, interval_forward

CSV_COLUMNS = (
    "variant",
    "skip_layers",
    "delta",
    "max_margin",
    "groups_total",
    "relus_total",
    "build_ms",
    "eval_us_median",
)
VARIANTS = ("ginnacer", "baseline", "ibp")
BUILD_REPEATS = 13
EVAL_TIMING_POINTS = 1000


@dataclass
class BenchConfig:
    centroid: np.ndarray
    deltas: Sequence[float]
    samples_per_delta: int = 10000
    seed: int = 0
    variants: Sequence[str] = VARIANTS
    skip_sweep: Sequence[int] = (0,)
    neg_input: str = "auto"
    timing: bool = True
    margin_metric: str = field(default="inf", init=False)  # infinity norm of the output width

    def __post_init__(self):
        self.centroid = np.asarray(self.centroid, dtype=np.float64)
        self.deltas = [float(d) for d in self.deltas]
        if not self.deltas:
            raise ValueError("at least one delta is required")
        if any(d <= 0 for d in self.deltas):
            raise ValueError("deltas must be positive")
        if any(b <= a for a, b in zip(self.deltas, self.deltas[1:])):
            raise ValueError("deltas must be strictly increasing")
        if self.samples_per_delta < 1:
            raise ValueError("samples_per_delta must be at least 1")
        unknown = set(self.variants) - set(VARIANTS)
        if unknown:
            raise ValueError(f"unknown variants {sorted(unknown)}; choose from {VARIANTS}")


def sample_hypercube_surface(c, delta: float, n: int, seed=None) -> np.ndarray:
    """``n`` points with ``max_i |x_i - c_i| = delta``.

    Each point is uniform in the cube, then one uniformly chosen coordinate is
    pushed to a face ``c_i +- delta`` with a uniform sign.
    """
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    c = np.asarray(c, dtype=np.float64)
    rng = np.random.default_rng(seed)
    d = c.shape[0]
    offsets = rng.uniform(-delta, delta, size=(n, d))
    axis = rng.integers(0, d, size=n)
    signs = rng.choice([-1.0, 1.0], size=n)
    offsets[np.arange(n), axis] = signs * delta
    return c + offsets


def _point_evaluator(obj) -> Callable[[np.ndarray], IntervalVector]:
    if isinstance(obj, GinnacerAbstraction):
        return lambda x: eval_ginnacer(obj, x)
    if isinstance(obj, MergeBaseline):
        return lambda x: eval_merge_baseline(obj, x)
    if callable(obj):
        return obj
    raise TypeError(f"cannot evaluate {type(obj).__name__}")


def _box_evaluator(obj) -> Callable[[IntervalVector], IntervalVector]:
    if isinstance(obj, GinnacerAbstraction):
        return lambda box: eval_ginnacer_interval(obj, box)
    if isinstance(obj, MergeBaseline):
        return lambda box: eval_merge_baseline_interval(obj, box)
    if isinstance(obj, Network):
        return lambda box: interval_forward(obj, box)
    if callable(obj):
        return obj
    raise TypeError(f"cannot evaluate {type(obj).__name__}")


def max_margin(evaluator, points) -> float:
    """Largest output width over ``points``, worst coordinate first.

    ``evaluator`` is an abstraction object or a callable mapping a batch of
    inputs to an ``IntervalVector``.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if points.shape[0] == 0:
        raise ValueError("need at least one point")
    out = _point_evaluator(evaluator)(points)
    return float(np.max(out.width))


def box_margin(evaluator, c, delta: float) -> float:
    """Largest output width over the whole box ``[c - delta, c + delta]``."""
    out = _box_evaluator(evaluator)(IntervalVector.box(c, delta))
    return float(np.max(out.width))


def sample_polynomial() -> np.ndarray:
    """The 201 samples ``(x, y)`` of a rational test function on ``[-10, 10]``, step 0.1."""
    x = np.arange(-100, 101) / 10.0
    y = (-0.035 * x**5 - 0.12 * x**3 + x) / (0.021 * x**6 - 0.10 * x**4 + 0.55 * x**2 + 1.0)
    return np.column_stack([x, y])


def write_polynomial_csv(path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x", "y"])
        for x, y in sample_polynomial():
            writer.writerow([repr(float(x)), repr(float(y))])


# ---------------------------------------------------------------------------


def _median_ms(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times) * 1e3


def _median_eval_us(evaluate, points: np.ndarray) -> float:
    times = []
    for x in points[:EVAL_TIMING_POINTS]:
        t0 = time.perf_counter()
        evaluate(x)
        times.append(time.perf_counter() - t0)
    return statistics.median(times) * 1e6


def run_benchmark(net: Network, config: BenchConfig) -> list[dict]:
    """One row per (variant, skip setting, delta).

    All variants are scored on the same surface samples for a given delta.
    The merge baseline is matched to the group counts of the GINNACER
    abstraction with no skipped layers. The ``ibp`` variant is plain interval
    propagation of the whole box, rebuilt for every delta.
    """
    c = config.centroid
    if c.shape != (net.input_dim,):
        raise ValueError(f"centroid has shape {c.shape}, expected ({net.input_dim},)")

    def build_g(k):
        return build_ginnacer(net, c, config.neg_input, k)

    variants: list[tuple[str, int, object, float | None]] = []
    if "ginnacer" in config.variants:
        for k in config.skip_sweep:
            abs_k = build_g(k)
            ms = _median_ms(lambda: build_g(k), BUILD_REPEATS) if config.timing else None
            variants.append(("ginnacer", k, abs_k, ms))
    if "baseline" in config.variants:
        targets = [h for _, h in build_g(0).relu_counts]

        def build_b():
            return build_merge_baseline(net, targets, config.seed)

        ms = _median_ms(build_b, BUILD_REPEATS) if config.timing else None
        variants.append(("baseline", 0, build_b(), ms))

    rows = []
    for di, delta in enumerate(config.deltas):
        points = sample_hypercube_surface(c, delta, config.samples_per_delta, seed=(config.seed, di))
        for name, k, obj, ms in variants:
            if isinstance(obj, GinnacerAbstraction):
                groups = relus = obj.abstract_relus
            else:
                groups, relus = sum(obj.group_counts), sum(obj.relu_counts)
            evaluate = _point_evaluator(obj)
            rows.append(
                {
                    "variant": name,
                    "skip_layers": k,
                    "delta": delta,
                    "max_margin": max_margin(evaluate, points),
                    "groups_total": groups,
                    "relus_total": relus,
                    "build_ms": ms,
                    "eval_us_median": _median_eval_us(evaluate, points) if config.timing else None,
                }
            )
        if "ibp" in config.variants:
            box = IntervalVector.box(c, delta)
            ms = _median_ms(lambda: interval_forward(net, box), BUILD_REPEATS) if config.timing else None
            rows.append(
                {
                    "variant": "ibp",
                    "skip_layers": 0,
                    "delta": delta,
                    "max_margin": box_margin(net, c, delta),
                    "groups_total": net.num_relus,
                    "relus_total": net.num_relus,
                    "build_ms": ms,
                    # the box bounds are computed once; per-point use is a lookup
                    "eval_us_median": 0.0 if config.timing else None,
                }
            )
    return rows


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row[col]) for col in CSV_COLUMNS])
    return buf.getvalue()


def write_csv(rows: Sequence[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(rows_to_csv(rows))
