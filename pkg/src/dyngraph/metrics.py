"""Temporal-graph statistics and the MMD evaluation suite.

Six statistics summarize a (binary) dynamic graph:

* betweenness   -- per node: shortest-path betweenness on each snapshot's
  active subgraph, normalized by (n-1)(n-2)/2, averaged over snapshots;
  snapshots with fewer than 3 active nodes contribute zero.
* broadcast / receive -- per node: row / column sums (divided by n) of the
  dynamic communicability matrix Q = prod_t (I - alpha * A_t)^{-1} taken in
  temporal order; alpha defaults to 0.9 / max_t rho(A_t).
* burstiness    -- per node: (sigma - m) / (sigma + m) over the gaps
  between snapshots in which the node has at least one incident edge;
  nodes with fewer than two active snapshots are filtered and counted.
* node temporal correlation -- per node: average neighbor-set overlap
  between consecutive snapshots; zero-denominator terms contribute 0.
* temporal correlation -- per graph: the mean of the node values.

Real and generated graph sets are compared per statistic with a biased
(V-statistic) squared MMD under a Gaussian kernel; per-node statistics are
pooled into one scalar sample set per side, per-graph statistics give one
scalar per graph. The estimator stores both kernel sums through math.fsum,
so mmd(S, S) is exactly 0 and mmd is exactly symmetric. Cost is quadratic
in the pooled sample count.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import networkx as nx
import numpy as np

from .data import DynamicGraph

__all__ = [
    "StatisticVector",
    "EvalReport",
    "STATISTIC_NAMES",
    "betweenness_stat",
    "communicability_stats",
    "burstiness_stat",
    "temporal_correlation",
    "mmd",
    "node_attribute_metrics",
    "evaluate",
]

STATISTIC_NAMES = (
    "betweenness",
    "broadcast",
    "burstiness",
    "node_temporal_correlation",
    "receive",
    "temporal_correlation",
)


@dataclass(frozen=True)
class StatisticVector:
    """Values of one statistic (per active node, or one per graph), plus
    the number of degenerate samples that were filtered out."""

    name: str
    values: np.ndarray
    degenerate: int = 0

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))


def _active_adjacency(g: DynamicGraph) -> np.ndarray:
    """(T, k, k) stack restricted to the active nodes."""
    idx = np.flatnonzero(g.node_mask)
    A = g.adjacency_stack()
    return A[np.ix_(range(g.T), idx, idx)]


def betweenness_stat(g: DynamicGraph) -> StatisticVector:
    A = _active_adjacency(g)
    k = A.shape[1]
    acc = np.zeros(k)
    if k >= 3:
        for t in range(g.T):
            G = nx.from_numpy_array(A[t] > 0)
            bc = nx.betweenness_centrality(G, normalized=True)
            acc += np.array([bc[i] for i in range(k)])
    return StatisticVector("betweenness", acc / g.T)


def communicability_stats(g: DynamicGraph, alpha: float = None) -> tuple:
    """(broadcast, receive) StatisticVectors from the ordered resolvent
    product. Requires alpha * rho(A_t) < 1 for every snapshot."""
    A = _active_adjacency(g)
    k = A.shape[1]
    radii = [float(np.max(np.abs(np.linalg.eigvalsh(A[t])))) if k else 0.0 for t in range(g.T)]
    max_rho = max(radii) if radii else 0.0
    if alpha is None:
        alpha = 0.9 / max_rho if max_rho > 0 else 0.1
    if max_rho > 0 and alpha * max_rho >= 1.0:
        raise ValueError(f"alpha * spectral radius = {alpha * max_rho:.4f} >= 1 violates the resolvent precondition")
    Q = np.eye(k)
    for t in range(g.T):
        M = np.eye(k) - alpha * A[t]
        try:
            # Q <- Q @ inv(M) without forming the inverse
            Q = np.linalg.solve(M.T, Q.T).T
        except np.linalg.LinAlgError as e:
            raise ValueError(f"singular resolvent at snapshot {t}") from e
    denom = max(k, 1)
    return (
        StatisticVector("broadcast", Q.sum(axis=1) / denom),
        StatisticVector("receive", Q.sum(axis=0) / denom),
    )


def burstiness_stat(g: DynamicGraph) -> StatisticVector:
    """Burstiness of per-node activity timings; sigma is the population
    standard deviation of the inter-event gaps."""
    A = _active_adjacency(g)
    active_at = A.sum(axis=2) > 0  # (T, k)
    values = []
    degenerate = 0
    for i in range(A.shape[1]):
        events = np.flatnonzero(active_at[:, i])
        if len(events) < 2:
            degenerate += 1
            continue
        gaps = np.diff(events)
        m = gaps.mean()
        s = gaps.std()
        values.append((s - m) / (s + m))
    return StatisticVector("burstiness", np.array(values), degenerate=degenerate)


def temporal_correlation(g: DynamicGraph) -> tuple:
    """(per-node StatisticVector, graph-level scalar).

    Per node: mean over consecutive snapshot pairs of
    sum_j A_t(i,j) A_{t+1}(i,j) / sqrt(deg_t(i) * deg_{t+1}(i)),
    zero-denominator terms contributing 0; the scalar is the mean over
    active nodes.
    """
    if g.T < 2:
        raise ValueError("temporal correlation needs at least 2 snapshots")
    A = _active_adjacency(g)
    k = A.shape[1]
    per_node = np.zeros(k)
    for t in range(g.T - 1):
        overlap = (A[t] * A[t + 1]).sum(axis=1)
        denom = np.sqrt(A[t].sum(axis=1) * A[t + 1].sum(axis=1))
        with np.errstate(invalid="ignore", divide="ignore"):
            term = np.where(denom > 0, overlap / np.where(denom > 0, denom, 1.0), 0.0)
        per_node += term
    per_node /= g.T - 1
    scalar = float(per_node.mean()) if k else 0.0
    return StatisticVector("node_temporal_correlation", per_node), scalar


def _pool(stats) -> np.ndarray:
    arrays = [np.atleast_1d(np.asarray(s.values if isinstance(s, StatisticVector) else s, dtype=np.float64))
              for s in stats]
    flat = np.concatenate(arrays) if arrays else np.array([])
    return np.sort(flat)


def _median_bandwidth(pooled: np.ndarray) -> float:
    x = pooled
    if len(x) > 2000:  # keep the quadratic median heuristic bounded
        x = x[np.linspace(0, len(x) - 1, 2000).astype(int)]
    if len(x) < 2:
        return 1.0
    d = np.abs(x[:, None] - x[None, :])
    med = float(np.median(d[np.triu_indices(len(x), k=1)]))
    return med if med > 0 else 1.0


def _kernel_mean(x: np.ndarray, y: np.ndarray, sigma: float) -> float:
    K = np.exp(-((x[:, None] - y[None, :]) ** 2) / (2.0 * sigma * sigma))
    return math.fsum(K.ravel()) / (len(x) * len(y))


def mmd(real_stats, gen_stats, bandwidth: float = None, floor: bool = True) -> float:
    """Biased squared-MMD estimate between two pooled scalar sample sets.

    bandwidth defaults to the median pairwise distance of the combined
    pooled sample (1.0 when that median is 0). The result is floored at 0
    unless floor=False (the raw value can round off to about -1e-12).
    """
    x = _pool(real_stats if isinstance(real_stats, (list, tuple)) else [real_stats])
    y = _pool(gen_stats if isinstance(gen_stats, (list, tuple)) else [gen_stats])
    if len(x) == 0 or len(y) == 0:
        raise ValueError("mmd needs nonempty sample sets on both sides")
    sigma = bandwidth if bandwidth is not None else _median_bandwidth(np.sort(np.concatenate([x, y])))
    raw = _kernel_mean(x, x, sigma) + _kernel_mean(y, y, sigma) - 2.0 * _kernel_mean(x, y, sigma)
    return max(raw, 0.0) if floor else raw


def _flat_features(g: DynamicGraph) -> np.ndarray:
    idx = np.flatnonzero(g.node_mask)
    return g.feature_stack()[:, idx, :].ravel()


def _rank_pairs(real_feats, gen_feats):
    """Deterministic rank pairing: sort both sides by mean feature value
    (ties broken by content) and match quantile positions."""
    key = lambda a: (float(a.mean()) if a.size else 0.0, a.tobytes())
    rs = sorted(real_feats, key=key)
    gs = sorted(gen_feats, key=key)
    m, k = len(rs), len(gs)
    return [(rs[(j * m) // k], gs[j]) for j in range(k)]


def node_attribute_metrics(real_graphs, gen_graphs) -> tuple:
    """(MSE, R2, PCC) over rank-paired, flattened masked feature tensors.

    R2 and PCC are None (undefined) when the reference side has zero
    variance; PCC also when the generated side does.
    """
    if not real_graphs or not gen_graphs:
        raise ValueError("node attribute metrics need nonempty graph sets")
    pairs = _rank_pairs([_flat_features(g) for g in real_graphs],
                        [_flat_features(g) for g in gen_graphs])
    for r, gn in pairs:
        if r.shape != gn.shape:
            raise ValueError("paired graphs have different masked feature shapes")
    x = np.concatenate([r for r, _ in pairs])
    y = np.concatenate([gn for _, gn in pairs])
    mse = float(np.mean((x - y) ** 2))

    def effectively_constant(v):
        return v.std() <= 1e-12 * (1.0 + abs(float(v.mean())))

    ss_tot = float(np.sum((x - x.mean()) ** 2))
    r2 = None if effectively_constant(x) else float(1.0 - np.sum((x - y) ** 2) / ss_tot)
    if effectively_constant(x) or effectively_constant(y):
        pcc = None
    else:
        pcc = float(np.mean((x - x.mean()) * (y - y.mean())) / (x.std() * y.std()))
    return mse, r2, pcc


@dataclass(frozen=True)
class EvalReport:
    """All metrics of one real-vs-generated comparison.

    mmd maps statistic name -> value (None when a side had no valid
    samples); degenerate counts explain any missing values.
    """

    mmd: dict
    mse: float
    r2: float
    pcc: float
    degenerate: dict
    num_real: int
    num_gen: int
    pairing: str = "mean-rank"

    def to_json(self) -> str:
        return json.dumps({
            "mmd": self.mmd, "mse": self.mse, "r2": self.r2, "pcc": self.pcc,
            "degenerate": self.degenerate, "num_real": self.num_real,
            "num_gen": self.num_gen, "pairing": self.pairing,
        }, sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "EvalReport":
        return cls(**json.loads(text))

    def format_table(self) -> str:
        headers = ["Betweenness", "Broadcast", "Burstiness", "Nodes' Temporal Corr.",
                   "Receive", "Temporal Corr."]
        keys = ["betweenness", "broadcast", "burstiness", "node_temporal_correlation",
                "receive", "temporal_correlation"]
        fmt = lambda v: "n/a" if v is None else f"{v:.4g}"
        widths = [max(len(h), 10) for h in headers]
        head = " | ".join(h.ljust(w) for h, w in zip(headers, widths))
        vals = " | ".join(fmt(self.mmd.get(k)).ljust(w) for k, w in zip(keys, widths))
        lines = [
            f"MMD (real: {self.num_real} graphs, generated: {self.num_gen} graphs)",
            head,
            "-" * len(head),
            vals,
            "",
            f"Node attributes  MSE: {fmt(self.mse)}  R2: {fmt(self.r2)}  PCC: {fmt(self.pcc)}",
        ]
        if any(self.degenerate.values()):
            lines.append("Degenerate samples: " + ", ".join(
                f"{k}={v}" for k, v in sorted(self.degenerate.items()) if v))
        return "\n".join(lines)


def _graph_statistics(g: DynamicGraph) -> dict:
    broadcast, receive = communicability_stats(g)
    node_corr, graph_corr = temporal_correlation(g)
    return {
        "betweenness": betweenness_stat(g),
        "broadcast": broadcast,
        "receive": receive,
        "burstiness": burstiness_stat(g),
        "node_temporal_correlation": node_corr,
        "temporal_correlation": StatisticVector("temporal_correlation", np.array([graph_corr])),
    }


def evaluate(real_graphs, gen_graphs, bandwidth: float = None, jobs: int = 1) -> EvalReport:
    """Run the full suite: six MMDs plus node-attribute MSE/R2/PCC."""
    real_graphs, gen_graphs = list(real_graphs), list(gen_graphs)
    if not real_graphs or not gen_graphs:
        raise ValueError("evaluate needs nonempty graph sets")
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            real_stats = list(ex.map(_graph_statistics, real_graphs))
            gen_stats = list(ex.map(_graph_statistics, gen_graphs))
    else:
        real_stats = [_graph_statistics(g) for g in real_graphs]
        gen_stats = [_graph_statistics(g) for g in gen_graphs]

    mmds = {}
    degenerate = {}
    for name in STATISTIC_NAMES:
        rs = [s[name] for s in real_stats]
        gs = [s[name] for s in gen_stats]
        r_count = sum(s.degenerate for s in rs)
        g_count = sum(s.degenerate for s in gs)
        if r_count or g_count:
            degenerate[f"{name}_real"] = r_count
            degenerate[f"{name}_gen"] = g_count
        if sum(s.values.size for s in rs) == 0 or sum(s.values.size for s in gs) == 0:
            mmds[name] = None
        else:
            mmds[name] = mmd(rs, gs, bandwidth=bandwidth)

    mse, r2, pcc = node_attribute_metrics(real_graphs, gen_graphs)
    if r2 is None or pcc is None:
        degenerate["attribute_reference_variance"] = 1
    return EvalReport(mmd=mmds, mse=mse, r2=r2, pcc=pcc, degenerate=degenerate,
                      num_real=len(real_graphs), num_gen=len(gen_graphs))
