"""Synthetic dynamic-graph generators.

Two families are provided:

* a preferential-attachment process whose edges carry continuous
  construction times, discretized into snapshot sequences (growing
  scale-free networks);
* a small "toy" family with known, fully labeled generative factors --
  a static chain backbone, one rotating contact edge, and sinusoidal
  3-D node coordinates -- used to exercise factor-disentanglement
  machinery against ground truth.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict

import numpy as np

from .data import DynamicGraph, DynamicGraphDataset, GraphSnapshot

__all__ = [
    "TimedEdgeStream",
    "FactorLabels",
    "generate_dynamic_ba",
    "discretize",
    "attach_synthetic_features",
    "generate_toy_disentangled",
    "toy_graph_from_labels",
    "write_factor_labels",
    "read_factor_labels",
]


@dataclass(frozen=True)
class TimedEdgeStream:
    """A set of undirected edges with continuous creation times in (0, 1].

    events is a tuple of (i, j, t) with 0 <= i < j < n and t nondecreasing.
    """

    n: int
    events: tuple

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        prev = 0.0
        for i, j, t in self.events:
            if not 0 <= i < j < self.n:
                raise ValueError(f"edge ({i}, {j}) out of range for n={self.n}")
            if t < prev:
                raise ValueError("event times must be nondecreasing")
            prev = t


def generate_dynamic_ba(n: int, m: int, seed: int) -> TimedEdgeStream:
    """Grow a preferential-attachment (scale-free) graph with edge times.

    Nodes 0..m-1 form the initial edgeless core; each of the remaining
    n - m nodes attaches to m distinct existing nodes chosen with
    probability proportional to current degree (the first arrival must
    attach to the whole core). The k-th constructed edge gets time
    t = k / ((n - m) * m), so times are evenly spaced in (0, 1].
    Deterministic given the seed.
    """
    if not 1 <= m < n:
        raise ValueError(f"need 1 <= m < n, got m={m}, n={n}")
    rng = np.random.default_rng(seed)
    total = (n - m) * m
    events = []
    # each node appears once per unit of degree; sampling an index uniformly
    # from this list realizes degree-proportional selection
    repeated_nodes: list = []
    k = 0
    for source in range(m, n):
        if source == m:
            targets = list(range(m))
        else:
            targets_set: set = set()
            while len(targets_set) < m:
                targets_set.add(repeated_nodes[rng.integers(len(repeated_nodes))])
            targets = sorted(targets_set)
        for v in targets:
            k += 1
            i, j = min(source, v), max(source, v)
            events.append((i, j, k / total))
        repeated_nodes.extend(targets)
        repeated_nodes.extend([source] * m)
    return TimedEdgeStream(n=n, events=tuple(events))


def discretize(stream: TimedEdgeStream, T: int, cumulative: bool = True) -> DynamicGraph:
    """Bin a timed edge stream into T snapshots (topology only, zero features).

    Snapshot t (0-based) holds edges with time in (t/T, (t+1)/T]; with
    cumulative=True (the default, matching a growth process) it instead
    holds every edge with time in (0, (t+1)/T].
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    n = stream.n
    mask = np.ones(n, dtype=bool)
    snapshots = []
    for t in range(T):
        lo = 0.0 if cumulative else t / T
        hi = (t + 1) / T
        adj = np.zeros((n, n))
        for i, j, tt in stream.events:
            if lo < tt <= hi:
                adj[i, j] = adj[j, i] = 1.0
        snapshots.append(GraphSnapshot(adj, np.zeros((n, 1)), mask))
    return DynamicGraph(tuple(snapshots))


def attach_synthetic_features(g: DynamicGraph, mode: str = "degree", seed: int = 0) -> DynamicGraph:
    """Replace node features with per-snapshot degrees (mode="degree") or
    degrees plus unit-variance Gaussian noise (mode="noise")."""
    if mode not in ("degree", "noise"):
        raise ValueError(f"unknown feature mode {mode!r}")
    rng = np.random.default_rng(seed)
    snapshots = []
    for s in g.snapshots:
        deg = s.adjacency.sum(axis=1, keepdims=True)
        if mode == "noise":
            deg = deg + rng.standard_normal(deg.shape)
        feat = deg * s.node_mask[:, None]
        snapshots.append(GraphSnapshot(s.adjacency, feat, s.node_mask))
    return DynamicGraph(tuple(snapshots))


@dataclass(frozen=True)
class FactorLabels:
    """Ground-truth generative factors of one toy graph.

    u, v pick the rotating contact edge; amplitude and phase parameterize
    the sinusoidal coordinate trajectory; (center_y, center_z) is a rigid
    per-graph translation of the coordinates, a purely time-invariant
    factor. Together with (n, T) the labels determine the graph exactly.
    """

    graph_index: int
    u: int
    v: int
    amplitude: float
    phase: float
    center_y: float = 0.0
    center_z: float = 0.0


def _rotation_partners(n: int, u: int) -> list:
    """Nodes the rotating edge may connect u to: anything not on the chain
    next to u and not u itself, so the extra edge never collides with the
    backbone."""
    return [w for w in range(n) if abs(w - u) >= 2]


def toy_graph_from_labels(n: int, T: int, labels: FactorLabels) -> DynamicGraph:
    """Rebuild a toy graph exactly from its recorded factor labels."""
    partners = _rotation_partners(n, labels.u)
    if not partners:
        raise ValueError(f"node u={labels.u} has no valid rotation partner for n={n}")
    mask = np.ones(n, dtype=bool)
    idx = np.arange(n)
    snapshots = []
    for t in range(T):
        adj = np.zeros((n, n))
        for i in range(n - 1):
            adj[i, i + 1] = adj[i + 1, i] = 1.0
        w = partners[(labels.v + t) % len(partners)]
        a, b = min(labels.u, w), max(labels.u, w)
        adj[a, b] = adj[b, a] = 1.0
        angle = 2 * math.pi * t / T + labels.phase + 2 * math.pi * idx / n
        feat = np.stack(
            [idx / n,
             labels.center_y + labels.amplitude * np.sin(angle),
             labels.center_z + labels.amplitude * np.cos(angle)],
            axis=1,
        )
        snapshots.append(GraphSnapshot(adj, feat, mask))
    return DynamicGraph(tuple(snapshots))


def generate_toy_disentangled(num_graphs: int, n: int, T: int, seed: int):
    """Build the labeled toy dataset.

    Every graph shares the chain backbone, and carries a per-graph rigid
    coordinate translation (both time-invariant factors); a per-graph
    rotating contact edge is the edge-dynamic factor and a per-graph
    sinusoid through the c=3 coordinate features is the node-dynamic
    factor. Per-graph parameters are drawn from seed + graph_index, so
    graphs are independently reproducible.

    Returns (dataset, list of FactorLabels).
    """
    if n < 3:
        raise ValueError("toy graphs need n >= 3")
    if T < 2:
        raise ValueError("toy graphs need T >= 2")
    valid_u = [u for u in range(n) if _rotation_partners(n, u)]
    graphs = []
    labels = []
    for g_idx in range(num_graphs):
        rng = np.random.default_rng(seed + g_idx)
        u = valid_u[rng.integers(len(valid_u))]
        v = int(rng.integers(len(_rotation_partners(n, u))))
        amplitude = float(rng.uniform(1.0, 3.0))
        phase = float(rng.uniform(0.0, 2 * math.pi))
        center_y, center_z = (float(x) for x in rng.normal(0.0, 2.0, size=2))
        lab = FactorLabels(graph_index=g_idx, u=int(u), v=v, amplitude=amplitude, phase=phase,
                           center_y=center_y, center_z=center_z)
        labels.append(lab)
        graphs.append(toy_graph_from_labels(n, T, lab))
    return DynamicGraphDataset(tuple(graphs), n_max=n, T=T, c=3), labels


def write_factor_labels(labels, path) -> None:
    """Write ground-truth labels as one JSON record per line."""
    with open(path, "w") as fh:
        for lab in labels:
            fh.write(json.dumps(asdict(lab)) + "\n")


def read_factor_labels(path) -> list:
    with open(path) as fh:
        return [FactorLabels(**json.loads(line)) for line in fh if line.strip()]
