"""Build the two synthetic dynamic-graph families and write them to disk.

Walks through the data layer: growing a scale-free network whose edges
carry construction times, slicing it into snapshots, attaching node
features, and generating the labeled toy dataset with known static /
edge-dynamic / node-dynamic factors.
"""

import numpy as np

from dyngraph import (
    DynamicGraphDataset,
    attach_synthetic_features,
    discretize,
    generate_dynamic_ba,
    generate_toy_disentangled,
    validate,
    write_dataset,
    write_factor_labels,
)

# --- a growing scale-free network -------------------------------------
# Each new node attaches to m=2 existing nodes preferentially by degree;
# the k-th edge gets creation time k / total, so snapshots are just time
# bins over (0, 1].
stream = generate_dynamic_ba(n=100, m=2, seed=7)
print(f"preferential-attachment stream: {stream.n} nodes, {len(stream.events)} timed edges")
print("first events:", stream.events[:3])

# Cumulative binning matches the growth process: snapshot t holds every
# edge created up to time (t+1)/T.
graph = discretize(stream, T=10, cumulative=True)
sizes = [int(s.adjacency.sum() / 2) for s in graph.snapshots]
print("edges per snapshot (cumulative):", sizes)

# Degree features give each node a one-dimensional attribute per snapshot.
graph = attach_synthetic_features(graph, mode="degree", seed=7)
assert validate(graph) == []

ds = DynamicGraphDataset((graph,), n_max=100, T=10, c=1)
write_dataset(ds, "ba_demo.jsonl")
print("wrote ba_demo.jsonl")

# The aggregated degree distribution is heavy-tailed, the scale-free
# signature:
deg = graph.snapshots[-1].adjacency.sum(axis=1)
print(f"final degrees: max {deg.max():.0f}, median {np.median(deg):.0f}")

# --- the labeled toy dataset -------------------------------------------
# Every graph shares a chain backbone, carries one rotating extra contact
# (edge dynamics), and traces per-graph sinusoid coordinates with a rigid
# per-graph translation (node dynamics + statics). The labels reproduce
# each graph exactly.
toy, labels = generate_toy_disentangled(num_graphs=30, n=8, T=20, seed=0)
write_dataset(toy, "toy_demo.jsonl")
write_factor_labels(labels, "toy_demo.jsonl.labels")
print(f"wrote toy_demo.jsonl ({len(toy)} graphs) and its factor labels")
print("first graph's factors:", labels[0])
