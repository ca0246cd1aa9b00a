"""Graph decoder: latent factors -> edge probabilities and node features.

Edges and nodes are decoded independently per snapshot (the conditional
independence of the generative model): edge probabilities see only the
edge-dynamic and joint factors plus the static factor, node features see
only the node-dynamic and joint factors plus the static factor. Nothing
flows between time steps inside the decoder.

The edge path upsamples the concatenated latent vector to per-node
embeddings with a dense layer and refines them with graph deconvolution
rounds H <- tanh(W [H || S H]) over the fixed row-normalized
complete-graph support S = (J - I) / (n - 1); the self half of the
update keeps node identity from washing out across rounds. Pair logits
are sigma-scored as H W_out H^T + g B, with B a learnable symmetric
per-pair bias so time-invariant structure has a path that bypasses the
latents, and a fixed gain g that matches the additive table's adaptation
speed to the multiplicative paths under adaptive-moment updates. The
output is symmetrized with a zeroed diagonal; everything is O(n^2) per
snapshot. The node path is a linear dense pathway through the same kind
of per-node embedding.
"""

from __future__ import annotations

import numpy as np
import torch
from torch import nn

from .data import DynamicGraph, GraphSnapshot
from .latent import LatentState

__all__ = ["GraphDecoder", "binarize", "STATIC_BIAS_GAIN"]

# gain on the per-pair logit bias; see the module docstring
STATIC_BIAS_GAIN = 80.0


class GraphDecoder(nn.Module):
    def __init__(self, n: int, c: int, d_static: int, d_edge: int, d_node: int, d_joint: int,
                 hidden: int = 64, depth: int = 2):
        super().__init__()
        self.n = n
        self.c = c
        self.d_static = d_static
        self.d_edge = d_edge
        self.d_node = d_node
        self.d_joint = d_joint
        self.hidden = hidden
        self.depth = depth

        self.edge_embed = nn.Linear(d_edge + d_joint + d_static, n * hidden)
        self.deconv = nn.ModuleList(nn.Linear(2 * hidden, hidden) for _ in range(depth))
        self.edge_bilinear = nn.Parameter(torch.empty(hidden, hidden))
        nn.init.xavier_uniform_(self.edge_bilinear)
        self.pair_bias = nn.Parameter(torch.zeros(n, n))
        self.node_embed = nn.Linear(d_node + d_joint + d_static, n * hidden)
        self.node_out = nn.Linear(hidden, c)
        self.double()

    def _support_mix(self, H: torch.Tensor) -> torch.Tensor:
        # S H for S = (J - I)/(n - 1): each node sees the mean of the others
        n = H.shape[-2]
        if n == 1:
            return torch.zeros_like(H)
        return (H.sum(dim=-2, keepdim=True) - H) / (n - 1)

    def _node_embeddings(self, z_edge_t, z_joint_t, static):
        u = torch.cat([z_edge_t, z_joint_t, static], dim=-1)
        H = self.edge_embed(u).reshape(*u.shape[:-1], self.n, self.hidden)
        for layer in self.deconv:
            H = torch.tanh(layer(torch.cat([H, self._support_mix(H)], dim=-1)))
        return H

    def _check_dims(self, pairs):
        for name, tensor, want in pairs:
            if tensor.shape[-1] != want:
                raise ValueError(f"{name} has dimension {tensor.shape[-1]}, expected {want}")

    def decode_edges(self, z_edge_t: torch.Tensor, z_joint_t: torch.Tensor, static: torch.Tensor) -> torch.Tensor:
        """Edge probabilities for one snapshot: (..., n, n), symmetric,
        zero diagonal, off-diagonal entries in (0, 1)."""
        self._check_dims([("edge factor", z_edge_t, self.d_edge),
                          ("joint factor", z_joint_t, self.d_joint),
                          ("static factor", static, self.d_static)])
        H = self._node_embeddings(z_edge_t, z_joint_t, static)
        static_logits = STATIC_BIAS_GAIN * 0.5 * (self.pair_bias + self.pair_bias.T)
        logits = H @ self.edge_bilinear @ H.transpose(-1, -2) + static_logits
        probs = torch.sigmoid(logits)
        probs = 0.5 * (probs + probs.transpose(-1, -2))
        off_diag = 1.0 - torch.eye(self.n, dtype=probs.dtype, device=probs.device)
        return probs * off_diag

    def decode_nodes(self, z_node_t: torch.Tensor, z_joint_t: torch.Tensor, static: torch.Tensor) -> torch.Tensor:
        """Node feature matrix for one snapshot: (..., n, c). Purely linear."""
        self._check_dims([("node factor", z_node_t, self.d_node),
                          ("joint factor", z_joint_t, self.d_joint),
                          ("static factor", static, self.d_static)])
        v = torch.cat([z_node_t, z_joint_t, static], dim=-1)
        X = self.node_embed(v).reshape(*v.shape[:-1], self.n, self.hidden)
        return self.node_out(X)

    def decode_sequence(self, state: LatentState):
        """Decode every snapshot independently.

        Returns (edge_probs, features) with shapes (..., T, n, n) and
        (..., T, n, c); time steps only interact through the latents.
        """
        T = state.T
        static_seq = state.static.unsqueeze(-2).expand(*state.static.shape[:-1], T, self.d_static)
        probs = self.decode_edges(state.edge, state.joint, static_seq)
        feats = self.decode_nodes(state.node, state.joint, static_seq)
        return probs, feats

    def decode_to_graph(self, state: LatentState, node_mask: np.ndarray = None) -> DynamicGraph:
        """Decode one (unbatched) latent state into a DynamicGraph with
        probabilistic adjacencies."""
        probs, feats = self.decode_sequence(state)
        probs = probs.detach().cpu().numpy()
        feats = feats.detach().cpu().numpy()
        mask = np.ones(self.n, dtype=bool) if node_mask is None else np.asarray(node_mask, dtype=bool)
        keep = mask.astype(float)
        pair_keep = np.outer(keep, keep)
        snapshots = [
            GraphSnapshot(probs[t] * pair_keep, feats[t] * keep[:, None], mask)
            for t in range(probs.shape[0])
        ]
        return DynamicGraph(tuple(snapshots))


def binarize(g: DynamicGraph, mode: str = "threshold", threshold: float = 0.5, seed: int = 0) -> DynamicGraph:
    """Turn a probabilistic graph into a binary one.

    threshold mode keeps an edge iff p >= threshold (ties count as edges);
    bernoulli mode flips one symmetric coin per upper-triangular entry,
    deterministically given the seed.
    """
    if mode not in ("threshold", "bernoulli"):
        raise ValueError(f"unknown binarize mode {mode!r}")
    rng = np.random.default_rng(seed)
    snapshots = []
    for s in g.snapshots:
        P = s.adjacency
        n = P.shape[0]
        if mode == "threshold":
            upper = np.triu(P >= threshold, k=1)
        else:
            u = rng.random((n, n))
            upper = np.triu(u < P, k=1)
        adj = (upper | upper.T).astype(float)
        keep = s.node_mask.astype(float)
        adj = adj * np.outer(keep, keep)
        snapshots.append(GraphSnapshot(adj, s.features, s.node_mask))
    return DynamicGraph(tuple(snapshots))
