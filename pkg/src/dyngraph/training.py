"""ELBO objectives and the training loop.

Likelihoods: Bernoulli over unordered active node pairs for edges,
unit-variance Gaussian (normalization constant included) for node
features, both summed over snapshots. The KL of every factor posterior
against its standard-normal prior is analytic. The KL weight ramps
linearly from 0 to 1 over the first fraction of epochs (warm-up against
posterior collapse); the weight on the static factor's KL can optionally
be multiplied by T to mirror writing that term inside the per-snapshot
sum.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, asdict

import numpy as np
import torch

from .data import DynamicGraph, DynamicGraphDataset
from .latent import GaussianParams
from .model import ABLATIONS, INFERENCE_MODES, DynamicGraphVAE, ModelConfig, graphs_to_tensors

__all__ = [
    "TrainConfig",
    "TrainReport",
    "EpochStats",
    "TrainingDiverged",
    "kl_standard_normal",
    "reconstruction_loss",
    "elbo",
    "elbo_terms",
    "train",
    "reconstruction_auc",
    "parse_train_config",
    "write_report",
    "read_report",
]

_PROB_EPS = 1e-12
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


class TrainingDiverged(RuntimeError):
    """Raised when a loss term stops being finite; names the term."""


def kl_standard_normal(p: GaussianParams) -> torch.Tensor:
    """KL(N(mu, diag exp(lv)) || N(0, I)), reduced over the event dim.

    Elementwise 0.5 * (exp(lv) + mu^2 - 1 - lv); always >= 0.
    """
    return 0.5 * (torch.exp(p.log_var) + p.mean ** 2 - 1.0 - p.log_var).sum(dim=-1)


def _pair_weights(mask: torch.Tensor, n: int) -> torch.Tensor:
    """(B, 1, n, n) weights selecting each unordered active pair once."""
    maskf = mask.double()
    pair = maskf.unsqueeze(-1) * maskf.unsqueeze(-2)
    upper = torch.triu(torch.ones(n, n, dtype=pair.dtype), diagonal=1)
    return (pair * upper).unsqueeze(1)


def edge_nll(probs: torch.Tensor, E: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
    """Bernoulli negative log-likelihood summed over snapshots and
    unordered active node pairs; (B,) per graph."""
    p = probs.clamp(_PROB_EPS, 1.0 - _PROB_EPS)
    bce = -(E * torch.log(p) + (1.0 - E) * torch.log1p(-p))
    return (bce * _pair_weights(mask, E.shape[-1])).sum(dim=(-1, -2, -3))


def node_nll(feats: torch.Tensor, F: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
    """Unit-variance Gaussian negative log-likelihood over active nodes,
    summed over snapshots; (B,) per graph."""
    per_entry = 0.5 * (F - feats) ** 2 + _HALF_LOG_2PI
    w = mask.double().unsqueeze(1).unsqueeze(-1)
    return (per_entry * w).sum(dim=(-1, -2, -3))


def reconstruction_loss(g: DynamicGraph, decoded: DynamicGraph) -> tuple:
    """(edge term, node term) between an observed graph and a decoded
    probabilistic one of the same shape. Masked entries contribute zero."""
    E, F, mask = graphs_to_tensors([g])
    P, Fd, _ = graphs_to_tensors([decoded])
    return float(edge_nll(P, E, mask)[0]), float(node_nll(Fd, F, mask)[0])


def elbo_terms(
    model: DynamicGraphVAE,
    E: torch.Tensor,
    F: torch.Tensor,
    mask: torch.Tensor,
    noise: dict = None,
    generator: torch.Generator = None,
    beta: float = 1.0,
    lambda_edge: float = 1.0,
    lambda_node: float = 1.0,
    static_kl_per_step: bool = False,
) -> dict:
    """Single-sample reparameterized ELBO estimate, per graph.

    Returns a dict of (B,) tensors: elbo, edge_nll, node_nll, kl_static,
    kl_edge, kl_node, kl_joint. Noise can be injected explicitly (tensors
    per factor) or drawn from a generator; either way the estimate is
    deterministic given it.
    """
    if noise is None:
        if generator is None:
            raise ValueError("provide either explicit noise or a generator")
        noise = model.draw_noise(E.shape[0], generator)
    post, static_sample = model.posteriors(E, F, mask, static_noise=noise["static"])
    state = model.sample_latents(post, noise, static_sample=static_sample)
    probs, feats = model.decoder.decode_sequence(state)

    terms = {
        "edge_nll": edge_nll(probs, E, mask),
        "node_nll": node_nll(feats, F, mask),
        "kl_static": kl_standard_normal(post.static),
        "kl_edge": kl_standard_normal(post.edge).sum(dim=-1),
        "kl_node": kl_standard_normal(post.node).sum(dim=-1),
        "kl_joint": kl_standard_normal(post.joint).sum(dim=-1),
    }
    static_weight = float(model.cfg.T) if static_kl_per_step else 1.0
    kl_total = (static_weight * terms["kl_static"] + terms["kl_edge"]
                + terms["kl_node"] + terms["kl_joint"])
    terms["elbo"] = -(lambda_edge * terms["edge_nll"] + lambda_node * terms["node_nll"]) - beta * kl_total
    return terms


def elbo(model: DynamicGraphVAE, g: DynamicGraph, seed: int = 0, **kwargs) -> tuple:
    """ELBO estimate for one graph with generator-seeded noise.

    Returns (elbo value, per-term breakdown as floats).
    """
    E, F, mask = graphs_to_tensors([g])
    gen = torch.Generator().manual_seed(seed)
    terms = elbo_terms(model, E, F, mask, generator=gen, **kwargs)
    floats = {k: float(v[0]) for k, v in terms.items()}
    return floats["elbo"], floats


@dataclass(frozen=True)
class TrainConfig:
    """Everything the trainer needs; the key-value config file uses these
    exact field names."""

    inference_mode: str = "factorized"
    learning_rate: float = 1e-3
    epochs: int = 200
    batch_size: int = 32
    seed: int = 0
    kl_warmup_frac: float = 0.2
    d_f: int = 32
    d_z: int = 16
    h: int = 64
    L: int = 2
    lambda_edge: float = 1.0
    lambda_node: float = 1.0
    checkpoint_every: int = 0
    static_kl_per_step: bool = False
    num_samples: int = 1
    ablation: str = "none"

    def __post_init__(self):
        if self.inference_mode not in INFERENCE_MODES:
            raise ValueError(f"inference_mode must be one of {INFERENCE_MODES}")
        if self.ablation not in ABLATIONS:
            raise ValueError(f"ablation must be one of {ABLATIONS}")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.lambda_edge <= 0 or self.lambda_node <= 0:
            raise ValueError("loss weights must be > 0")
        if not 0.0 <= self.kl_warmup_frac <= 1.0:
            raise ValueError("kl_warmup_frac must be in [0, 1]")
        if self.num_samples < 1:
            raise ValueError("num_samples must be >= 1")


def parse_train_config(path) -> TrainConfig:
    """Read a flat `key = value` config file (# starts a comment)."""
    known = set(TrainConfig.__dataclass_fields__)
    defaults = TrainConfig()
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line {lineno}: expected 'key = value', got {raw.strip()!r}")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key not in known:
                raise ValueError(f"config line {lineno}: unknown key {key!r}")
            current = getattr(defaults, key)
            if isinstance(current, bool):
                if val.lower() not in ("true", "false"):
                    raise ValueError(f"config line {lineno}: {key} must be true or false")
                values[key] = val.lower() == "true"
            elif isinstance(current, int):
                values[key] = int(val)
            elif isinstance(current, float):
                values[key] = float(val)
            else:
                values[key] = val
    return TrainConfig(**values)


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    neg_elbo: float
    edge_nll: float
    node_nll: float
    kl_f: float
    kl_edge: float
    kl_node: float
    kl_joint: float
    seconds: float


@dataclass(frozen=True)
class TrainReport:
    epochs: tuple

    def final(self) -> EpochStats:
        return self.epochs[-1]


def write_report(report: TrainReport, path) -> None:
    with open(path, "w") as fh:
        for row in report.epochs:
            fh.write(json.dumps(asdict(row)) + "\n")


def read_report(path) -> TrainReport:
    with open(path) as fh:
        return TrainReport(tuple(EpochStats(**json.loads(line)) for line in fh if line.strip()))


def kl_weight(epoch: int, cfg: TrainConfig) -> float:
    """Linear warm-up of the KL weight over the first kl_warmup_frac of
    epochs; 1.0 afterwards. Epochs are 1-based."""
    warm = max(1, round(cfg.kl_warmup_frac * cfg.epochs))
    return min(1.0, epoch / warm)


def train(ds: DynamicGraphDataset, cfg: TrainConfig, checkpoint_path=None, report_path=None):
    """Fit the model by adaptive-moment gradient ascent on the ELBO.

    Fully reproducible given cfg.seed on one platform. Returns
    (model, TrainReport); when checkpoint_path is given the final model
    is saved there and, with checkpoint_every > 0, intermediates go to
    `<checkpoint_path>.epoch<k>`.
    """
    from .checkpoint import save_checkpoint

    if len(ds) == 0:
        raise ValueError("cannot train on an empty dataset")
    model_cfg = ModelConfig.create(n=ds.n_max, c=ds.c, T=ds.T, d_f=cfg.d_f, d_z=cfg.d_z,
                                   hidden=cfg.h, depth=cfg.L, mode=cfg.inference_mode,
                                   ablation=cfg.ablation)
    model = DynamicGraphVAE(model_cfg, seed=cfg.seed)
    optimizer = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate)

    E_all, F_all, mask_all = graphs_to_tensors(ds.graphs)
    shuffle_rng = np.random.default_rng(cfg.seed)
    noise_gen = torch.Generator().manual_seed(cfg.seed)
    num = len(ds)

    rows = []
    for epoch in range(1, cfg.epochs + 1):
        start = time.perf_counter()
        beta = kl_weight(epoch, cfg)
        perm = shuffle_rng.permutation(num)
        sums = {k: 0.0 for k in ("elbo", "edge_nll", "node_nll", "kl_static", "kl_edge", "kl_node", "kl_joint")}
        for lo in range(0, num, cfg.batch_size):
            idx = perm[lo:lo + cfg.batch_size]
            E, F, mask = E_all[idx], F_all[idx], mask_all[idx]
            acc = None
            for _ in range(cfg.num_samples):
                terms = elbo_terms(model, E, F, mask, generator=noise_gen, beta=beta,
                                   lambda_edge=cfg.lambda_edge, lambda_node=cfg.lambda_node,
                                   static_kl_per_step=cfg.static_kl_per_step)
                acc = terms if acc is None else {k: acc[k] + terms[k] for k in terms}
            terms = {k: v / cfg.num_samples for k, v in acc.items()}
            for name, t in terms.items():
                if not torch.isfinite(t).all():
                    raise TrainingDiverged(f"non-finite {name} at epoch {epoch}")
            loss = -terms["elbo"].mean()
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            for k in sums:
                sums[k] += float(terms[k].detach().sum())
        rows.append(EpochStats(
            epoch=epoch,
            neg_elbo=-sums["elbo"] / num,
            edge_nll=sums["edge_nll"] / num,
            node_nll=sums["node_nll"] / num,
            kl_f=sums["kl_static"] / num,
            kl_edge=sums["kl_edge"] / num,
            kl_node=sums["kl_node"] / num,
            kl_joint=sums["kl_joint"] / num,
            seconds=time.perf_counter() - start,
        ))
        if checkpoint_path is not None and cfg.checkpoint_every > 0 and epoch % cfg.checkpoint_every == 0:
            save_checkpoint(model, f"{checkpoint_path}.epoch{epoch}")

    report = TrainReport(tuple(rows))
    if checkpoint_path is not None:
        save_checkpoint(model, checkpoint_path)
    if report_path is not None:
        write_report(report, report_path)
    return model, report


def reconstruction_auc(model: DynamicGraphVAE, graphs) -> float:
    """Area under the ROC curve of posterior-mean edge probabilities
    against the true adjacencies, over active pairs of all snapshots."""
    from scipy.stats import rankdata

    E, F, mask = graphs_to_tensors(graphs)
    probs, _ = model.reconstruct_probs(E, F, mask)
    w = _pair_weights(mask, E.shape[-1]).expand_as(E)
    sel = w.reshape(-1) > 0
    scores = probs.detach().reshape(-1)[sel].numpy()
    labels = E.reshape(-1)[sel].numpy()
    pos = labels > 0.5
    n_pos, n_neg = int(pos.sum()), int((~pos).sum())
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both edge and non-edge examples")
    ranks = rankdata(scores)
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))
