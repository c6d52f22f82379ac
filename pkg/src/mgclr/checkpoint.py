"""Parameter checkpoint archive: one binary file holding named float32
little-endian tensors with shape headers plus a JSON architecture
config (same numeric convention as the dataset payload)."""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np
import torch

_MAGIC = b"MGCKPT01"
_TENSOR_DTYPE = np.dtype("<f4")


class CheckpointError(ValueError):
    pass


def save_checkpoint(path, arch_config: dict, tensors: dict[str, np.ndarray]) -> None:
    entries = []
    blobs = []
    offset = 0
    for name in sorted(tensors):
        raw = np.asarray(tensors[name], dtype=_TENSOR_DTYPE)
        # note: ascontiguousarray promotes 0-d to 1-d, so record shape first
        entries.append({"name": name, "shape": list(raw.shape), "offset": offset})
        blobs.append(np.ascontiguousarray(raw).tobytes())
        offset += raw.nbytes
    header = json.dumps({"arch": arch_config, "tensors": entries}).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<Q", len(header)))
        fh.write(header)
        for blob in blobs:
            fh.write(blob)


def load_checkpoint(path) -> tuple[dict, dict[str, np.ndarray]]:
    blob = Path(path).read_bytes()
    if blob[: len(_MAGIC)] != _MAGIC:
        raise CheckpointError(f"not a checkpoint file: {path}")
    header_len = struct.unpack("<Q", blob[len(_MAGIC) : len(_MAGIC) + 8])[0]
    body_start = len(_MAGIC) + 8
    header = json.loads(blob[body_start : body_start + header_len].decode("utf-8"))
    data_start = body_start + header_len
    tensors = {}
    for entry in header["tensors"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        start = data_start + entry["offset"]
        arr = np.frombuffer(blob, dtype=_TENSOR_DTYPE, count=count, offset=start)
        tensors[entry["name"]] = arr.reshape(shape).copy()
    return header["arch"], tensors


def module_state(module: torch.nn.Module) -> dict[str, np.ndarray]:
    return {name: value.detach().cpu().numpy() for name, value in module.state_dict().items()}


def load_module_state(module: torch.nn.Module, tensors: dict[str, np.ndarray]) -> None:
    dtype = next(module.parameters()).dtype
    state = {name: torch.as_tensor(arr, dtype=dtype) for name, arr in tensors.items()}
    module.load_state_dict(state)
