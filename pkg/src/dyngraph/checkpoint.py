"""Model checkpointing.

A checkpoint is a single zip archive with a `metadata.json` record
(keys: d_f, d_z, h, L, n_max, c, T, inference_mode, ablation, plus the
effective factor dimensions and a format version) and one `weights/<name>.npy`
entry per parameter or buffer, keyed by the canonical state-dict names of
the model. Zip entry timestamps are pinned so identical models produce
byte-identical files.
"""

from __future__ import annotations

import io
import json
import zipfile

import numpy as np
import torch

from .model import DynamicGraphVAE, ModelConfig

__all__ = ["save_checkpoint", "load_checkpoint", "read_metadata"]

_EPOCH = (1980, 1, 1, 0, 0, 0)
FORMAT_VERSION = 1


def _metadata(cfg: ModelConfig) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "d_f": cfg.d_static,
        "d_z": cfg.d_z_base,
        "h": cfg.hidden,
        "L": cfg.depth,
        "n_max": cfg.n,
        "c": cfg.c,
        "T": cfg.T,
        "inference_mode": cfg.mode,
        "ablation": cfg.ablation,
        "d_edge": cfg.d_edge,
        "d_node": cfg.d_node,
        "d_joint": cfg.d_joint,
        "readout": cfg.readout,
    }


def _config_from_metadata(meta: dict) -> ModelConfig:
    return ModelConfig(
        n=meta["n_max"], c=meta["c"], T=meta["T"],
        d_static=meta["d_f"], d_edge=meta["d_edge"], d_node=meta["d_node"],
        d_joint=meta["d_joint"], hidden=meta["h"], depth=meta["L"],
        mode=meta["inference_mode"], ablation=meta.get("ablation", "none"),
        d_z_base=meta["d_z"], readout=meta.get("readout", "flatten"),
    )


def save_checkpoint(model: DynamicGraphVAE, path) -> None:
    entries = [("metadata.json", json.dumps(_metadata(model.cfg), sort_keys=True).encode())]
    for name, tensor in sorted(model.state_dict().items()):
        buf = io.BytesIO()
        np.lib.format.write_array(buf, tensor.detach().cpu().numpy(), allow_pickle=False)
        entries.append((f"weights/{name}.npy", buf.getvalue()))
    with open(path, "wb") as fh:
        with zipfile.ZipFile(fh, "w", zipfile.ZIP_DEFLATED) as zf:
            for name, payload in entries:
                info = zipfile.ZipInfo(name, date_time=_EPOCH)
                info.compress_type = zipfile.ZIP_DEFLATED
                info.external_attr = 0o644 << 16
                zf.writestr(info, payload)


def read_metadata(path) -> dict:
    with zipfile.ZipFile(path) as zf:
        return json.loads(zf.read("metadata.json"))


def load_checkpoint(path) -> DynamicGraphVAE:
    """Rebuild the model (matching encoder included) from a checkpoint."""
    with zipfile.ZipFile(path) as zf:
        meta = json.loads(zf.read("metadata.json"))
        if meta.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"unsupported checkpoint format version {meta.get('format_version')}")
        model = DynamicGraphVAE(_config_from_metadata(meta))
        state = {}
        prefix, suffix = "weights/", ".npy"
        for name in zf.namelist():
            if name.startswith(prefix) and name.endswith(suffix):
                arr = np.lib.format.read_array(io.BytesIO(zf.read(name)), allow_pickle=False)
                state[name[len(prefix):-len(suffix)]] = torch.from_numpy(arr.copy())
        model.load_state_dict(state)
    return model
