"""Greedy valid neuron partitioning for a layer in inactive canonical form.

Neurons are merged into groups that share one upper-bound ReLU. A group ``D``
takes the elementwise maximum of its canonical weights and biases; it is valid
when the merged potential ``V_D . xc + u_D`` is nonpositive at the layer
centroid ``xc``, which keeps the shared ReLU switched off there.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .network import row_potentials


class PartitionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Partition:
    groups: tuple[tuple[int, ...], ...]  # 0-based neuron indices, sorted by first member
    merged_weights: np.ndarray  # (h, n_in)
    merged_biases: np.ndarray  # (h,)
    candidates: int = field(default=0, compare=False)  # merge attempts made by the greedy scan

    @property
    def h(self) -> int:
        return len(self.groups)

    @property
    def n(self) -> int:
        return sum(len(g) for g in self.groups)

    def group_index(self) -> np.ndarray:
        idx = np.empty(self.n, dtype=np.int64)
        for k, g in enumerate(self.groups):
            idx[list(g)] = k
        return idx


def merged_upper_params(SW, Sb, D) -> tuple[np.ndarray, float]:
    SW = np.asarray(SW, dtype=np.float64)
    Sb = np.asarray(Sb, dtype=np.float64)
    D = list(D)
    if not D:
        raise PartitionError("cannot merge an empty set of neurons")
    n = SW.shape[0]
    if any(i < 0 or i >= n for i in D):
        raise PartitionError(f"neuron index out of range 0..{n - 1}: {D}")
    return SW[D].max(axis=0), float(Sb[D].max())


def potentials(V, u, xc) -> np.ndarray:
    """Merged potentials ``V @ xc + u`` for stacked groups."""
    return row_potentials(np.atleast_2d(V), np.atleast_1d(u), xc)


def is_valid_subset(V_D, u_D, xc) -> bool:
    V_D = np.asarray(V_D, dtype=np.float64)
    xc = np.asarray(xc, dtype=np.float64)
    if V_D.shape != xc.shape:
        raise ValueError(f"weights have shape {V_D.shape}, centroid has {xc.shape}")
    return bool(potentials(V_D, u_D, xc)[0] <= 0.0)


def valid_partition(SW, Sb, xc) -> Partition:
    """Sequential pairwise merging over ordered pairs ``i < j``.

    For each surviving group ``i`` the remaining groups ``j > i`` are visited in
    ascending order and absorbed whenever the union stays valid. Runs of
    rejected candidates are scored in one vectorised step; this visits exactly
    the same pairs, in the same order, as the plain double loop.
    """
    SW = np.asarray(SW, dtype=np.float64)
    Sb = np.asarray(Sb, dtype=np.float64)
    xc = np.asarray(xc, dtype=np.float64)
    n = SW.shape[0]
    if Sb.shape != (n,) or xc.shape != (SW.shape[1],):
        raise ValueError("inconsistent shapes for canonical weights, biases and centroid")

    singles = potentials(SW, Sb, xc)
    bad = np.flatnonzero(singles > 0.0)
    if bad.size:
        raise PartitionError(
            f"neurons {bad.tolist()} are active at the centroid; the layer is not in inactive canonical form"
        )

    alive = np.ones(n, dtype=bool)
    members: list[list[int]] = [[i] for i in range(n)]
    V = SW.copy()
    u = Sb.copy()
    candidates = 0
    for i in range(n - 1):
        if not alive[i]:
            continue
        start = i + 1
        while True:
            rest = start + np.flatnonzero(alive[start:])
            if rest.size == 0:
                break
            trial_V = np.maximum(V[i], V[rest])
            trial_u = np.maximum(u[i], u[rest])
            ok = potentials(trial_V, trial_u, xc) <= 0.0
            hit = np.flatnonzero(ok)
            if hit.size == 0:
                candidates += rest.size
                break
            k = hit[0]
            j = rest[k]
            candidates += k + 1
            V[i] = trial_V[k]
            u[i] = trial_u[k]
            members[i].extend(members[j])
            alive[j] = False
            start = j + 1

    keep = np.flatnonzero(alive)
    groups = tuple(tuple(sorted(members[i])) for i in keep)
    return Partition(groups, V[keep].copy(), u[keep].copy(), int(candidates))


def check_partition(part: Partition, n: int, xc) -> None:
    """Raise ``PartitionError`` unless ``part`` is a valid partition of ``range(n)``."""
    flat = sorted(i for g in part.groups for i in g)
    if flat != list(range(n)):
        raise PartitionError("groups do not form a partition of the layer's neurons")
    if any(len(g) == 0 for g in part.groups):
        raise PartitionError("empty group")
    r_hat = potentials(part.merged_weights, part.merged_biases, xc)
    bad = np.flatnonzero(r_hat > 0.0)
    if bad.size:
        raise PartitionError(f"groups {bad.tolist()} have positive merged potential at the centroid")
