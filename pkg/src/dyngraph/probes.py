"""Latent-factor traversal probes and ablation trainers.

A traversal draws one base latent state, resamples exactly one factor k
times while holding the rest fixed, decodes every variant, and condenses
the result into three scores: mean pairwise L1 distance between the
variants' edge-probability tensors, the same for feature tensors, and the
mean L1 distance between consecutive snapshots within a variant (with its
per-step profile kept for uniformity checks). Distances are taken on the
probabilistic decoder outputs, before any binarization.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, replace

import numpy as np
import torch

from .latent import LatentState
from .model import DynamicGraphVAE
from .training import TrainConfig, train

__all__ = ["ProbeResult", "traverse", "ablation_no_f", "ablation_merged_z", "FACTOR_ALIASES"]

# the command-line names of the factors map onto the internal ones
FACTOR_ALIASES = {
    "f": "static", "z_edge": "edge", "z_node": "node", "z_joint": "joint",
    "static": "static", "edge": "edge", "node": "node", "joint": "joint",
    "none": None, None: None,
}


@dataclass(frozen=True)
class ProbeResult:
    varied_factor: str
    graphs: tuple
    edge_variation: float
    node_variation: float
    within_time_variation: float
    per_step_variation: np.ndarray

    def scores_json(self) -> str:
        return json.dumps({
            "varied_factor": self.varied_factor,
            "edge_variation": self.edge_variation,
            "node_variation": self.node_variation,
            "within_time_variation": self.within_time_variation,
            "per_step_variation": list(self.per_step_variation),
        }, sort_keys=True, indent=2)


def _mean_pairwise_l1(x: torch.Tensor) -> float:
    k = x.shape[0]
    dists = [float((x[i] - x[j]).abs().sum()) for i, j in itertools.combinations(range(k), 2)]
    return float(np.mean(dists)) if dists else 0.0


def traverse(model: DynamicGraphVAE, factor, k: int, seed: int, base_graph=None) -> ProbeResult:
    """Resample one factor k times around a base state and score the
    resulting variation.

    factor is one of f/z_edge/z_node/z_joint (or the internal aliases);
    "none" resamples nothing and serves as a control. The base state
    comes from the prior, or from the posterior means of base_graph when
    given. Deterministic given the seed.
    """
    if k < 2:
        raise ValueError("need at least k=2 variants")
    if factor not in FACTOR_ALIASES:
        raise ValueError(f"unknown factor {factor!r}; expected one of f, z_edge, z_node, z_joint, none")
    name = FACTOR_ALIASES[factor]
    gen = torch.Generator().manual_seed(seed)

    if base_graph is None:
        base = model.sample_prior(1, gen)
    else:
        from .model import graphs_to_tensors
        E, F, mask = graphs_to_tensors([base_graph])
        post, f = model.posteriors(E, F, mask, use_static_mean=True)
        base = LatentState(static=post.static.mean if f is None else f,
                           edge=post.edge.mean, node=post.node.mean, joint=post.joint.mean)

    expand = lambda t: t.expand(k, *t.shape[1:])
    fields = {f_name: expand(getattr(base, f_name)) for f_name in ("static", "edge", "node", "joint")}
    if name is not None:
        fresh = model.sample_prior(k, gen)
        fields[name] = getattr(fresh, name)
    states = LatentState(**fields)

    with torch.no_grad():
        probs, feats = model.decoder.decode_sequence(states)
    graphs = model._to_graphs(probs, feats)

    T = model.cfg.T
    if T >= 2:
        step = ((probs[:, 1:] - probs[:, :-1]).abs().sum(dim=(-1, -2))
                + (feats[:, 1:] - feats[:, :-1]).abs().sum(dim=(-1, -2)))  # (k, T-1)
        per_step = step.mean(dim=0).detach().numpy()
    else:
        per_step = np.zeros(0)

    return ProbeResult(
        varied_factor=str(factor),
        graphs=tuple(graphs),
        edge_variation=_mean_pairwise_l1(probs),
        node_variation=_mean_pairwise_l1(feats),
        within_time_variation=float(per_step.mean()) if per_step.size else 0.0,
        per_step_variation=per_step,
    )


def ablation_no_f(ds, cfg: TrainConfig, **train_kwargs):
    """Train a variant without the static factor; its dimension is folded
    into the per-snapshot factors (each grows by round(d_f / 3))."""
    return train(ds, replace(cfg, ablation="no_f"), **train_kwargs)


def ablation_merged_z(ds, cfg: TrainConfig, **train_kwargs):
    """Train a variant whose three per-snapshot factors are merged into a
    single sequence (total width 3 * d_z) feeding both decoder paths."""
    return train(ds, replace(cfg, ablation="merged_z"), **train_kwargs)
