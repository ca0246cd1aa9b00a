"""Approximate-posterior encoders for dynamic graphs.

Every snapshot is first summarized by two h-vectors: a topology readout
a_t from a two-layer graph convolution over the adjacency alone (input
node signal: an active-node indicator plus the node degree, symmetric
degree normalization with self-loops, mean pooling over active nodes),
and an attribute readout b_t from a dense transform of the flattened,
masked feature matrix.

The static factor is encoded the same way in both inference modes: a
bidirectional LSTM runs over the (a_t || b_t) sequence and a dense head
on its final-position output (last forward output concatenated with the
first backward output) yields the posterior mean and log variance.

The factorized encoder maps each snapshot summary through per-factor
MLPs, so the posterior at time t depends on snapshot t only. The full
encoder first samples the static factor, then runs one bidirectional
LSTM per factor over the f-conditioned summary sequences with per-step
output heads, so posteriors couple across time through the recurrent
state.
"""

from __future__ import annotations

import torch
from torch import nn

from .latent import GaussianParams, PosteriorSet, clamp_log_var, reparameterize

__all__ = ["SnapshotEncoder", "StaticEncoder", "FactorizedEncoder", "FullEncoder"]


def _split_stats(x: torch.Tensor, d: int) -> GaussianParams:
    return GaussianParams(mean=x[..., :d], log_var=clamp_log_var(x[..., d:]))


def _empty_params(shape, dtype, device) -> GaussianParams:
    z = torch.zeros(*shape, 0, dtype=dtype, device=device)
    return GaussianParams(z, z.clone())


class SnapshotEncoder(nn.Module):
    """Per-snapshot readouts (a_t, b_t) for topology and attributes.

    The topology readout condenses the per-node graph-convolution
    embeddings either through a dense layer over their (masked) stack
    ("flatten", the default: position-aware, so the encoder can tell
    which pair carries a contact) or by mean pooling over active nodes
    ("mean": permutation-invariant but blind to edge positions).
    """

    def __init__(self, n: int, c: int, hidden: int, readout: str = "flatten"):
        super().__init__()
        if readout not in ("flatten", "mean"):
            raise ValueError(f"readout must be 'flatten' or 'mean', got {readout!r}")
        self.n = n
        self.c = c
        self.hidden = hidden
        self.readout = readout
        self.gcn1 = nn.Linear(2, hidden)
        self.gcn2 = nn.Linear(hidden, hidden)
        if readout == "flatten":
            self.gcn_readout = nn.Linear(n * hidden, hidden)
        self.feat_dense = nn.Linear(n * c, hidden)
        self.double()

    def forward(self, E: torch.Tensor, F: torch.Tensor, mask: torch.Tensor):
        """E: (..., n, n), F: (..., n, c), mask: (..., n) boolean.

        Returns (a, b), each (..., hidden).
        """
        degree = E.sum(dim=-1)
        maskf = torch.broadcast_to(mask.to(E.dtype), degree.shape)
        # symmetric normalization over the self-looped adjacency
        eye = torch.eye(self.n, dtype=E.dtype, device=E.device)
        A_tilde = E + eye
        d_inv_sqrt = A_tilde.sum(dim=-1).pow(-0.5)
        A_hat = d_inv_sqrt.unsqueeze(-1) * A_tilde * d_inv_sqrt.unsqueeze(-2)

        X = torch.stack([maskf, degree], dim=-1)
        H = torch.tanh(self.gcn1(A_hat @ X))
        H = torch.tanh(self.gcn2(A_hat @ H))
        H = H * maskf.unsqueeze(-1)
        if self.readout == "flatten":
            a = self.gcn_readout(H.reshape(*H.shape[:-2], self.n * self.hidden))
        else:
            denom = maskf.sum(dim=-1, keepdim=True).clamp(min=1.0)
            a = H.sum(dim=-2) / denom

        flat = (F * maskf.unsqueeze(-1)).reshape(*F.shape[:-2], self.n * self.c)
        b = self.feat_dense(flat)
        return a, b


class StaticEncoder(nn.Module):
    """Posterior over the time-invariant factor from the summary sequence."""

    def __init__(self, hidden: int, d_static: int):
        super().__init__()
        self.d_static = d_static
        self.bilstm = nn.LSTM(2 * hidden, hidden, bidirectional=True, batch_first=True)
        self.head = nn.Linear(2 * hidden, 2 * d_static)
        self.double()

    def forward(self, seq: torch.Tensor) -> GaussianParams:
        """seq: (B, T, 2*hidden) -> GaussianParams over (B, d_static)."""
        if seq.shape[1] < 1:
            raise ValueError("need at least one snapshot to encode the static factor")
        out, _ = self.bilstm(seq)
        return _split_stats(self.head(out[:, -1, :]), self.d_static)


class FactorizedEncoder(nn.Module):
    """Per-snapshot posteriors with no dependence across time or on the
    static factor."""

    def __init__(self, n: int, c: int, hidden: int, d_static: int, d_edge: int, d_node: int, d_joint: int,
                 readout: str = "flatten"):
        super().__init__()
        self.dims = (d_static, d_edge, d_node, d_joint)
        self.snapshot_enc = SnapshotEncoder(n, c, hidden, readout=readout)
        self.static_enc = StaticEncoder(hidden, d_static) if d_static > 0 else None
        def mlp(d_in, d_out):
            return nn.Sequential(nn.Linear(d_in, hidden), nn.Tanh(), nn.Linear(hidden, 2 * d_out))
        self.edge_mlp = mlp(hidden, d_edge) if d_edge > 0 else None
        self.node_mlp = mlp(hidden, d_node) if d_node > 0 else None
        self.joint_mlp = mlp(2 * hidden, d_joint) if d_joint > 0 else None
        self.double()

    def forward(self, E: torch.Tensor, F: torch.Tensor, mask: torch.Tensor) -> PosteriorSet:
        """E: (B, T, n, n), F: (B, T, n, c), mask: (B, n)."""
        d_static, d_edge, d_node, d_joint = self.dims
        a, b = self.snapshot_enc(E, F, mask.unsqueeze(1))
        ab = torch.cat([a, b], dim=-1)
        B, T = a.shape[0], a.shape[1]
        kw = dict(dtype=E.dtype, device=E.device)
        static = self.static_enc(ab) if d_static > 0 else _empty_params((B,), **kw)
        edge = _split_stats(self.edge_mlp(a), d_edge) if d_edge > 0 else _empty_params((B, T), **kw)
        node = _split_stats(self.node_mlp(b), d_node) if d_node > 0 else _empty_params((B, T), **kw)
        joint = _split_stats(self.joint_mlp(ab), d_joint) if d_joint > 0 else _empty_params((B, T), **kw)
        return PosteriorSet(static=static, edge=edge, node=node, joint=joint)


class FullEncoder(nn.Module):
    """Posteriors with temporal coupling and conditioning on one sampled
    static factor."""

    def __init__(self, n: int, c: int, hidden: int, d_static: int, d_edge: int, d_node: int, d_joint: int,
                 readout: str = "flatten"):
        super().__init__()
        self.dims = (d_static, d_edge, d_node, d_joint)
        self.snapshot_enc = SnapshotEncoder(n, c, hidden, readout=readout)
        self.static_enc = StaticEncoder(hidden, d_static) if d_static > 0 else None
        def seq_head(d_in, d_out):
            lstm = nn.LSTM(d_in, hidden, bidirectional=True, batch_first=True)
            head = nn.Linear(2 * hidden, 2 * d_out)
            return lstm, head
        if d_edge > 0:
            self.edge_lstm, self.edge_head = seq_head(hidden + d_static, d_edge)
        else:
            self.edge_lstm = self.edge_head = None
        if d_node > 0:
            self.node_lstm, self.node_head = seq_head(hidden + d_static, d_node)
        else:
            self.node_lstm = self.node_head = None
        if d_joint > 0:
            self.joint_lstm, self.joint_head = seq_head(2 * hidden + d_static, d_joint)
        else:
            self.joint_lstm = self.joint_head = None
        self.double()

    def forward(
        self,
        E: torch.Tensor,
        F: torch.Tensor,
        mask: torch.Tensor,
        static_noise: torch.Tensor = None,
        use_static_mean: bool = False,
    ):
        """Returns (PosteriorSet, static_sample).

        The static posterior is computed first and one reparameterized
        sample of it conditions the three per-factor sequence encoders
        (posterior mean instead when use_static_mean is set).
        """
        d_static, d_edge, d_node, d_joint = self.dims
        a, b = self.snapshot_enc(E, F, mask.unsqueeze(1))
        ab = torch.cat([a, b], dim=-1)
        B, T = a.shape[0], a.shape[1]
        kw = dict(dtype=E.dtype, device=E.device)

        if d_static > 0:
            static = self.static_enc(ab)
            if use_static_mean:
                f = static.mean
            else:
                if static_noise is None:
                    raise ValueError("full encoder needs static_noise (or use_static_mean=True)")
                f = reparameterize(static, static_noise)
            f_seq = f.unsqueeze(1).expand(B, T, d_static)
        else:
            static = _empty_params((B,), **kw)
            f = torch.zeros(B, 0, **kw)
            f_seq = torch.zeros(B, T, 0, **kw)

        def run(lstm, head, seq, d_out):
            out, _ = lstm(torch.cat([seq, f_seq], dim=-1))
            return _split_stats(head(out), d_out)

        edge = run(self.edge_lstm, self.edge_head, a, d_edge) if d_edge > 0 else _empty_params((B, T), **kw)
        node = run(self.node_lstm, self.node_head, b, d_node) if d_node > 0 else _empty_params((B, T), **kw)
        joint = run(self.joint_lstm, self.joint_head, ab, d_joint) if d_joint > 0 else _empty_params((B, T), **kw)
        return PosteriorSet(static=static, edge=edge, node=node, joint=joint), f
