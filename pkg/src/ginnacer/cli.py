"""Command line interface: ``ginnacer {abstract,eval,baseline,bench,gen-poly}``."""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from .abstraction import (
    AbstractionError,
    build_ginnacer,
    eval_ginnacer,
    load_abstraction,
    relu_stats,
    save_abstraction,
    verify_abstraction,
)
from .baseline import baseline_to_dict, build_merge_baseline
from .bench import VARIANTS, BenchConfig, run_benchmark, write_csv, write_polynomial_csv
from .network import NetworkFormatError, load_network
from .partition import PartitionError


def _read_vector(path, *, batch_ok: bool = False) -> np.ndarray:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON: {exc}") from None
    arr = np.asarray(doc, dtype=np.float64)
    if arr.ndim != 1 and not (batch_ok and arr.ndim == 2):
        raise ValueError(f"{path}: expected a JSON array of numbers")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{path}: non-finite entries")
    return arr


def _parse_deltas(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _parse_sweep(text: str, max_skip: int) -> list[int]:
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        hi_val = max_skip if hi.strip().upper() in ("L", "ALL", "") else int(hi)
        return list(range(int(lo), hi_val + 1))
    return [int(tok) for tok in text.split(",") if tok.strip()]


def cmd_abstract(args) -> int:
    net = load_network(args.network)
    xc = _read_vector(args.centroid)
    lower = None if args.input_lower is None else np.full(net.input_dim, args.input_lower)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        abs_ = build_ginnacer(net, xc, args.neg_input, args.skip_layers, input_lower=lower)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    verify_abstraction(abs_)
    save_abstraction(abs_, args.out)
    for row in relu_stats(abs_):
        name = "pre-layer" if row.layer == 0 else f"layer {row.layer}"
        print(f"{name}: {row.abstracted}/{row.original} ReLUs ({row.percent_remaining:.1f}%)", file=sys.stderr)
    return 0


def cmd_eval(args) -> int:
    abs_ = load_abstraction(args.abstraction)
    verify_abstraction(abs_)
    x = _read_vector(args.input, batch_ok=True)
    out = eval_ginnacer(abs_, x)
    print(json.dumps({"lower": out.lower.tolist(), "upper": out.upper.tolist()}))
    return 0


def cmd_baseline(args) -> int:
    net = load_network(args.network)
    abs_ = load_abstraction(args.match)
    targets = [h for _, h in abs_.relu_counts]
    bl = build_merge_baseline(net, targets, args.seed, pre_layer=abs_.pre_layer is not None)
    Path(args.out).write_text(json.dumps(baseline_to_dict(bl)) + "\n")
    print(f"groups {bl.group_counts}, ReLUs {bl.relu_counts}", file=sys.stderr)
    return 0


def cmd_bench(args) -> int:
    net = load_network(args.network)
    config = BenchConfig(
        centroid=_read_vector(args.centroid),
        deltas=_parse_deltas(args.deltas),
        samples_per_delta=args.samples,
        seed=args.seed,
        variants=[v.strip() for v in args.variants.split(",") if v.strip()],
        skip_sweep=_parse_sweep(args.skip_sweep, net.num_relu_layers),
        neg_input=args.neg_input,
        timing=not args.no_timing,
    )
    write_csv(run_benchmark(net, config), args.out)
    return 0


def cmd_gen_poly(args) -> int:
    write_polynomial_csv(args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ginnacer", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("abstract", help="build an abstraction around a centroid")
    p.add_argument("--network", required=True)
    p.add_argument("--centroid", required=True, help="JSON array")
    p.add_argument("--neg-input", choices=("on", "off", "auto"), default="auto")
    p.add_argument("--input-lower", type=float, default=None, help="lower bound of every input (for --neg-input auto)")
    p.add_argument("--skip-layers", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_abstract)

    p = sub.add_parser("eval", help="evaluate an abstraction on an input (or a batch of inputs)")
    p.add_argument("--abstraction", required=True)
    p.add_argument("--input", required=True, help="JSON array, or array of arrays")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("baseline", help="build a random merge baseline matched to an abstraction")
    p.add_argument("--network", required=True)
    p.add_argument("--match", required=True, help="abstraction JSON whose group counts are copied")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("bench", help="worst-case margins on hypercube surfaces")
    p.add_argument("--network", required=True)
    p.add_argument("--centroid", required=True)
    p.add_argument("--deltas", default="0.01,0.1,1,10")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--variants", default=",".join(VARIANTS))
    p.add_argument("--skip-sweep", default="0", help="e.g. 0..L, 0..2 or 0,2")
    p.add_argument("--neg-input", choices=("on", "off", "auto"), default="auto")
    p.add_argument("--no-timing", action="store_true", help="leave timing columns empty (byte-reproducible CSV)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen-poly", help="write the 201 polynomial samples as CSV")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_poly)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (AbstractionError, PartitionError) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2
    except (NetworkFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
