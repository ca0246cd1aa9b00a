import numpy as np
import pytest
import torch

from dyngraph import DynamicGraph, GraphSnapshot
from dyngraph.decoder import GraphDecoder
from dyngraph.encoders import FactorizedEncoder, FullEncoder

TINY = dict(n=3, c=2, d_static=2, d_edge=2, d_node=2, d_joint=2, hidden=2, depth=1)


def fill_params(module: torch.nn.Module, weight_value: float = 0.1) -> None:
    """The tiny-fixture convention: every weight 0.1, every bias 0."""
    with torch.no_grad():
        for name, p in module.named_parameters():
            p.fill_(0.0 if "bias" in name else weight_value)


def zero_params(module: torch.nn.Module) -> None:
    with torch.no_grad():
        for p in module.parameters():
            p.zero_()


@pytest.fixture
def tiny_decoder() -> GraphDecoder:
    dec = GraphDecoder(**TINY)
    fill_params(dec)
    return dec


@pytest.fixture
def tiny_factorized_encoder() -> FactorizedEncoder:
    enc = FactorizedEncoder(TINY["n"], TINY["c"], TINY["hidden"],
                            TINY["d_static"], TINY["d_edge"], TINY["d_node"], TINY["d_joint"])
    fill_params(enc)
    return enc


@pytest.fixture
def tiny_full_encoder() -> FullEncoder:
    enc = FullEncoder(TINY["n"], TINY["c"], TINY["hidden"],
                      TINY["d_static"], TINY["d_edge"], TINY["d_node"], TINY["d_joint"])
    fill_params(enc)
    return enc


def path_graph_2snap() -> DynamicGraph:
    """3-node test graph: a path that loses one edge in the second snapshot."""
    mask = np.ones(3, dtype=bool)
    a0 = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=float)
    a1 = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=float)
    f0 = np.array([[0.5, -0.2], [1.0, 0.3], [-0.5, 0.8]])
    f1 = np.array([[0.4, -0.1], [0.9, 0.2], [-0.6, 0.7]])
    return DynamicGraph((GraphSnapshot(a0, f0, mask), GraphSnapshot(a1, f1, mask)))


@pytest.fixture
def tiny_graph() -> DynamicGraph:
    return path_graph_2snap()
