"""Global interval abstractions of ReLU networks, exact at a chosen centroid."""

from .abstraction import (
    AbstractionError,
    GinnacerAbstraction,
    LayerAbstraction,
    LayerStats,
    build_ginnacer,
    eval_ginnacer,
    eval_ginnacer_interval,
    load_abstraction,
    relu_stats,
    save_abstraction,
    verify_abstraction,
)
from .baseline import MergeBaseline, build_merge_baseline, eval_merge_baseline, eval_merge_baseline_interval
from .bench import BenchConfig, max_margin, run_benchmark, sample_hypercube_surface, sample_polynomial
from .icf import CentroidContext, LayerCentroid, build_pre_layers, centroid_activation, centroid_context, icf_eval
from .network import (
    IntervalVector,
    Layer,
    Network,
    NetworkFormatError,
    affine_interval_map,
    forward,
    interval_forward,
    load_network,
    random_network,
    save_network,
)
from .partition import Partition, PartitionError, is_valid_subset, merged_upper_params, valid_partition

__version__ = "0.1.0"
