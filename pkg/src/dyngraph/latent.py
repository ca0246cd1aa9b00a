"""Latent factors, Gaussian posterior parameters, and reparameterized sampling.

The generative state of one dynamic graph splits into four factors: a
time-invariant vector ("static") plus three per-snapshot sequences driving
edge-only, node-only, and joint edge-node dynamics. Every factor has an
isotropic standard-normal prior.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch

__all__ = [
    "LOG_VAR_MIN",
    "LOG_VAR_MAX",
    "FACTOR_NAMES",
    "GaussianParams",
    "LatentState",
    "PosteriorSet",
    "clamp_log_var",
    "reparameterize",
    "sample_prior",
]

# keeps exp(log_var) and the KL finite; applied wherever posteriors are produced
LOG_VAR_MIN = -10.0
LOG_VAR_MAX = 10.0

FACTOR_NAMES = ("static", "edge", "node", "joint")


def clamp_log_var(log_var: torch.Tensor) -> torch.Tensor:
    return log_var.clamp(LOG_VAR_MIN, LOG_VAR_MAX)


@dataclass(frozen=True)
class GaussianParams:
    """Diagonal Gaussian as (mean, log variance); trailing dim is the event dim."""

    mean: torch.Tensor
    log_var: torch.Tensor

    def __post_init__(self):
        if self.mean.shape != self.log_var.shape:
            raise ValueError(f"mean shape {tuple(self.mean.shape)} != log_var shape {tuple(self.log_var.shape)}")

    @property
    def dim(self) -> int:
        return self.mean.shape[-1]

    def detached(self) -> "GaussianParams":
        return GaussianParams(self.mean.detach(), self.log_var.detach())


def reparameterize(p: GaussianParams, noise: torch.Tensor) -> torch.Tensor:
    """sample = mean + exp(0.5 * log_var) * noise, with noise ~ N(0, I).

    Gradients flow to mean and log_var; the noise tensor is treated as a
    constant, which is the whole point of the trick.
    """
    if noise.shape != p.mean.shape:
        raise ValueError(f"noise shape {tuple(noise.shape)} != parameter shape {tuple(p.mean.shape)}")
    return p.mean + torch.exp(0.5 * p.log_var) * noise


@dataclass(frozen=True)
class LatentState:
    """One full latent configuration.

    static : (..., d_static)
    edge, node, joint : (..., T, d) per-snapshot sequences
    """

    static: torch.Tensor
    edge: torch.Tensor
    node: torch.Tensor
    joint: torch.Tensor

    @property
    def T(self) -> int:
        return self.joint.shape[-2]

    def replace(self, **kwargs) -> "LatentState":
        fields = {"static": self.static, "edge": self.edge, "node": self.node, "joint": self.joint}
        fields.update(kwargs)
        return LatentState(**fields)


@dataclass(frozen=True)
class PosteriorSet:
    """Approximate posterior for every factor of one (batch of) graph(s).

    static is a single Gaussian; edge/node/joint hold per-snapshot Gaussians
    stacked along a time axis: mean shape (..., T, d).
    """

    static: GaussianParams
    edge: GaussianParams
    node: GaussianParams
    joint: GaussianParams

    def factors(self) -> dict:
        return {"static": self.static, "edge": self.edge, "node": self.node, "joint": self.joint}


def sample_prior(
    T: int,
    d_static: int,
    d_edge: int,
    d_node: int,
    d_joint: int,
    generator: torch.Generator,
    batch_shape: tuple = (),
    dtype: torch.dtype = torch.float64,
) -> LatentState:
    """Draw one latent state with every entry i.i.d. standard normal."""
    def draw(*shape):
        return torch.randn(*batch_shape, *shape, generator=generator, dtype=dtype)

    return LatentState(
        static=draw(d_static),
        edge=draw(T, d_edge),
        node=draw(T, d_node),
        joint=draw(T, d_joint),
    )
