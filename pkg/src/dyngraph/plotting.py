"""Static-image rendering of dynamic graphs and evaluation tables.

Graphs are drawn on a grid (rows: graphs, columns: snapshots) with a
deterministic circular node layout, node color mapped to the first feature
and edge opacity to the edge weight, so probabilistic and binary graphs
render the same way.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .metrics import EvalReport

__all__ = ["plot_graph_grid", "plot_report_table"]


def _node_positions(n: int) -> np.ndarray:
    angles = 2 * np.pi * np.arange(n) / max(n, 1)
    return np.stack([np.cos(angles), np.sin(angles)], axis=1)


def plot_graph_grid(graphs, path, max_graphs: int = 4, max_snapshots: int = 8, dpi: int = 100) -> None:
    graphs = list(graphs)[:max_graphs]
    if not graphs:
        raise ValueError("nothing to plot")
    T = min(graphs[0].T, max_snapshots)
    cols = np.linspace(0, graphs[0].T - 1, T).astype(int)
    fig, axes = plt.subplots(len(graphs), T, figsize=(1.8 * T, 1.8 * len(graphs)), squeeze=False)
    for r, g in enumerate(graphs):
        idx = np.flatnonzero(g.node_mask)
        pos = _node_positions(len(idx))
        feats = g.feature_stack()[:, idx, 0]
        lo, hi = feats.min(), feats.max()
        span = hi - lo if hi > lo else 1.0
        for ci, t in enumerate(cols):
            ax = axes[r][ci]
            A = g.snapshots[t].adjacency[np.ix_(idx, idx)]
            for i in range(len(idx)):
                for j in range(i + 1, len(idx)):
                    w = A[i, j]
                    if w > 0.05:
                        ax.plot([pos[i, 0], pos[j, 0]], [pos[i, 1], pos[j, 1]],
                                color="gray", alpha=min(float(w), 1.0), lw=1.0, zorder=1)
            colors = (feats[t] - lo) / span
            ax.scatter(pos[:, 0], pos[:, 1], c=colors, cmap="viridis", vmin=0, vmax=1,
                       s=40, zorder=2)
            ax.set_xlim(-1.3, 1.3)
            ax.set_ylim(-1.3, 1.3)
            ax.set_xticks([])
            ax.set_yticks([])
            if r == 0:
                ax.set_title(f"t={t}", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)


def plot_report_table(report: EvalReport, path, dpi: int = 100) -> None:
    text = report.format_table()
    lines = text.splitlines()
    fig, ax = plt.subplots(figsize=(max(len(line) for line in lines) * 0.09, 0.3 * len(lines) + 0.6))
    ax.axis("off")
    ax.text(0.0, 1.0, text, family="monospace", fontsize=9, va="top")
    fig.savefig(path, dpi=dpi, bbox_inches="tight")
    plt.close(fig)
