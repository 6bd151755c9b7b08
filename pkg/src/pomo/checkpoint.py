"""Deterministic model checkpoints.

A checkpoint is a small binary with a fixed layout — magic, version, a
sorted-key JSON header describing parameters, then raw little-endian tensor
bytes in header order — plus a plain-text sidecar recording the model config
and vocabulary hash. The layout guarantees byte-identical files for
identical parameters, which pickle-based serializers do not.
"""

import json
import struct

import numpy
import torch

MAGIC = b"POMOCKPT"
VERSION = 1

_DTYPES = {
    "float32": (torch.float32, numpy.float32),
    "float64": (torch.float64, numpy.float64),
    "int64": (torch.int64, numpy.int64),
}


def save_checkpoint(path, state_dict: dict, meta: dict) -> None:
    entries = []
    for name in sorted(state_dict):
        tensor = state_dict[name].detach().cpu().contiguous()
        dtype = str(tensor.dtype).removeprefix("torch.")
        if dtype not in _DTYPES:
            raise ValueError(f"unsupported checkpoint dtype {dtype} for {name}")
        entries.append([name, dtype, list(tensor.shape)])
    header = json.dumps(
        {"meta": meta, "params": entries}, sort_keys=True, separators=(",", ":")
    ).encode("utf-8")
    with open(path, "wb") as handle:
        handle.write(MAGIC)
        handle.write(struct.pack("<I", VERSION))
        handle.write(struct.pack("<Q", len(header)))
        handle.write(header)
        for name, dtype, _ in entries:
            array = state_dict[name].detach().cpu().contiguous().numpy()
            handle.write(array.astype(_DTYPES[dtype][1], copy=False).tobytes())


def load_checkpoint(path) -> tuple:
    """Returns (state_dict of tensors, meta dict)."""
    with open(path, "rb") as handle:
        if handle.read(len(MAGIC)) != MAGIC:
            raise ValueError(f"{path}: not a checkpoint file")
        (version,) = struct.unpack("<I", handle.read(4))
        if version != VERSION:
            raise ValueError(f"{path}: unsupported checkpoint version {version}")
        (header_len,) = struct.unpack("<Q", handle.read(8))
        header = json.loads(handle.read(header_len).decode("utf-8"))
        state = {}
        for name, dtype, shape in header["params"]:
            torch_dtype, numpy_dtype = _DTYPES[dtype]
            count = 1
            for dim in shape:
                count *= dim
            raw = handle.read(count * numpy.dtype(numpy_dtype).itemsize)
            array = numpy.frombuffer(raw, dtype=numpy_dtype).reshape(shape)
            state[name] = torch.from_numpy(array.copy()).to(torch_dtype)
    return state, header["meta"]


def write_sidecar(path, config: dict, vocab_sha256: str) -> None:
    """Plain-text companion recording the config and vocabulary hash."""
    lines = ["[checkpoint]"]
    lines.append(f"vocab_sha256 = {vocab_sha256}")
    for key in sorted(config):
        lines.append(f"{key} = {json.dumps(config[key], sort_keys=True)}")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


def read_sidecar(path) -> tuple:
    """Returns (config dict, vocab_sha256)."""
    config = {}
    vocab_sha = None
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line or line.startswith("["):
                continue
            key, _, value = line.partition(" = ")
            if key == "vocab_sha256":
                vocab_sha = value
            else:
                config[key] = json.loads(value)
    return config, vocab_sha
