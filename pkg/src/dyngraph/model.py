"""The full generative model: configuration, encoder/decoder wiring, sampling.

A model instance owns one decoder and one encoder (factorized or full
inference). Two ablated wirings are supported: dropping the static factor
(its dimension folded into the per-snapshot factors) and merging the three
per-snapshot factors into a single sequence feeding both decoder paths.
Both are expressed purely through the four effective factor dimensions, so
the rest of the code never branches on the ablation.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import torch
from torch import nn

from .data import DynamicGraph, DynamicGraphDataset
from .decoder import GraphDecoder
from .encoders import FactorizedEncoder, FullEncoder
from .latent import LatentState, PosteriorSet, reparameterize, sample_prior

__all__ = ["ModelConfig", "DynamicGraphVAE", "dataset_to_tensors", "graphs_to_tensors"]

INFERENCE_MODES = ("factorized", "full")
ABLATIONS = ("none", "no_f", "merged_z")


@dataclass(frozen=True)
class ModelConfig:
    """Shapes and wiring of one model.

    d_static/d_edge/d_node/d_joint are the effective factor dimensions
    after applying the ablation; d_z_base records the pre-ablation
    per-factor width for bookkeeping.
    """

    n: int
    c: int
    T: int
    d_static: int
    d_edge: int
    d_node: int
    d_joint: int
    hidden: int
    depth: int
    mode: str
    ablation: str = "none"
    d_z_base: int = 0
    readout: str = "flatten"

    def __post_init__(self):
        if self.mode not in INFERENCE_MODES:
            raise ValueError(f"inference mode must be one of {INFERENCE_MODES}, got {self.mode!r}")
        if self.ablation not in ABLATIONS:
            raise ValueError(f"ablation must be one of {ABLATIONS}, got {self.ablation!r}")

    @classmethod
    def create(cls, n: int, c: int, T: int, d_f: int = 32, d_z: int = 16,
               hidden: int = 64, depth: int = 2, mode: str = "factorized",
               ablation: str = "none", readout: str = "flatten") -> "ModelConfig":
        if ablation == "none":
            dims = (d_f, d_z, d_z, d_z)
        elif ablation == "no_f":
            grown = d_z + round(d_f / 3)
            dims = (0, grown, grown, grown)
        elif ablation == "merged_z":
            dims = (d_f, 0, 0, 3 * d_z)
        else:
            raise ValueError(f"ablation must be one of {ABLATIONS}, got {ablation!r}")
        return cls(n=n, c=c, T=T, d_static=dims[0], d_edge=dims[1], d_node=dims[2],
                   d_joint=dims[3], hidden=hidden, depth=depth, mode=mode,
                   ablation=ablation, d_z_base=d_z, readout=readout)

    def with_T(self, T: int) -> "ModelConfig":
        return replace(self, T=T)


class DynamicGraphVAE(nn.Module):
    """Encoder + decoder pair over padded dynamic graphs of fixed shape."""

    def __init__(self, cfg: ModelConfig, seed: int = 0):
        super().__init__()
        self.cfg = cfg
        enc_cls = FactorizedEncoder if cfg.mode == "factorized" else FullEncoder
        # parameter initialization is a pure function of the seed
        with torch.random.fork_rng(devices=[]):
            torch.manual_seed(seed)
            self.encoder = enc_cls(cfg.n, cfg.c, cfg.hidden, cfg.d_static,
                                   cfg.d_edge, cfg.d_node, cfg.d_joint,
                                   readout=cfg.readout)
            self.decoder = GraphDecoder(cfg.n, cfg.c, cfg.d_static, cfg.d_edge,
                                        cfg.d_node, cfg.d_joint, cfg.hidden, cfg.depth)

    # ---- encoding ----

    def posteriors(self, E, F, mask, static_noise=None, use_static_mean=False):
        """Returns (PosteriorSet, static_sample-or-None).

        The full encoder must draw (or fix) the static sample up front
        because the per-snapshot posteriors condition on it; the
        factorized encoder has no such coupling and returns None.
        """
        cfg = self.cfg
        if E.shape[-2:] != (cfg.n, cfg.n) or F.shape[-2:] != (cfg.n, cfg.c) or E.shape[-3] != cfg.T:
            raise ValueError(
                f"input shapes {tuple(E.shape)}/{tuple(F.shape)} do not match the model's "
                f"(T={cfg.T}, n={cfg.n}, c={cfg.c})")
        if self.cfg.mode == "factorized":
            return self.encoder(E, F, mask), None
        return self.encoder(E, F, mask, static_noise=static_noise, use_static_mean=use_static_mean)

    def draw_noise(self, batch: int, generator: torch.Generator) -> dict:
        """Standard-normal noise for every factor, in a fixed draw order."""
        cfg = self.cfg
        def rnd(*shape):
            return torch.randn(*shape, generator=generator, dtype=torch.float64)
        return {
            "static": rnd(batch, cfg.d_static),
            "edge": rnd(batch, cfg.T, cfg.d_edge),
            "node": rnd(batch, cfg.T, cfg.d_node),
            "joint": rnd(batch, cfg.T, cfg.d_joint),
        }

    def sample_latents(self, post: PosteriorSet, noise: dict, static_sample=None) -> LatentState:
        """Reparameterized draw from a PosteriorSet; static_sample, when
        given, overrides the static draw (full mode reuses the sample
        that conditioned the encoder)."""
        if static_sample is None:
            static_sample = reparameterize(post.static, noise["static"])
        return LatentState(
            static=static_sample,
            edge=reparameterize(post.edge, noise["edge"]),
            node=reparameterize(post.node, noise["node"]),
            joint=reparameterize(post.joint, noise["joint"]),
        )

    # ---- generation ----

    def sample_prior(self, batch: int, generator: torch.Generator) -> LatentState:
        cfg = self.cfg
        return sample_prior(cfg.T, cfg.d_static, cfg.d_edge, cfg.d_node, cfg.d_joint,
                            generator, batch_shape=(batch,))

    def generate(self, num: int, seed: int) -> list:
        """Sample `num` prior latent states and decode them into
        probabilistic dynamic graphs (all nodes active)."""
        gen = torch.Generator().manual_seed(seed)
        with torch.no_grad():
            state = self.sample_prior(num, gen)
            probs, feats = self.decoder.decode_sequence(state)
        return self._to_graphs(probs, feats)

    def reconstruct_probs(self, E, F, mask):
        """Deterministic reconstruction through the posterior means
        (the evaluation-time alternative to sampling)."""
        with torch.no_grad():
            post, f = self.posteriors(E, F, mask, use_static_mean=True)
            if f is None:
                f = post.static.mean
            state = LatentState(static=f, edge=post.edge.mean, node=post.node.mean, joint=post.joint.mean)
            return self.decoder.decode_sequence(state)

    def _to_graphs(self, probs: torch.Tensor, feats: torch.Tensor) -> list:
        from .data import GraphSnapshot
        probs = probs.detach().cpu().numpy()
        feats = feats.detach().cpu().numpy()
        mask = np.ones(self.cfg.n, dtype=bool)
        graphs = []
        for b in range(probs.shape[0]):
            snaps = [GraphSnapshot(probs[b, t], feats[b, t], mask) for t in range(self.cfg.T)]
            graphs.append(DynamicGraph(tuple(snaps)))
        return graphs


def graphs_to_tensors(graphs) -> tuple:
    """Stack DynamicGraphs into (E, F, mask) double tensors of shapes
    (B, T, n, n), (B, T, n, c), (B, n)."""
    E = torch.from_numpy(np.stack([g.adjacency_stack() for g in graphs])).double()
    F = torch.from_numpy(np.stack([g.feature_stack() for g in graphs])).double()
    mask = torch.from_numpy(np.stack([g.node_mask for g in graphs]))
    return E, F, mask


def dataset_to_tensors(ds: DynamicGraphDataset) -> tuple:
    return graphs_to_tensors(ds.graphs)
