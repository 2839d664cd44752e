"""Binary model checkpoints.

Layout (all integers little-endian u32):

    magic  b"CSRN"
    version
    header_len, header      UTF-8 JSON: {"config": ..., "metadata": ...}
    tensor_count
    per tensor:
        name_len, name      UTF-8
        rank, extents[rank]
        data                float32 little-endian, C order

The JSON header is serialized with sorted keys and fixed separators, and
tensors are written in a fixed name order, so saving the same model twice
produces byte-identical files.
"""

import json
import struct
from pathlib import Path

import numpy as np

from .model import ModelConfig, ModelParams, build_model

MAGIC = b"CSRN"
VERSION = 1


class CheckpointError(Exception):
    """Raised when a checkpoint file is malformed or inconsistent."""


def save_checkpoint(params, path):
    path = Path(path)
    header = json.dumps({"config": params.config.to_dict(), "metadata": params.metadata},
                        sort_keys=True, separators=(",", ":")).encode("utf-8")
    chunks = [MAGIC, struct.pack("<I", VERSION),
              struct.pack("<I", len(header)), header,
              struct.pack("<I", len(params.tensors))]
    for name in params.names():
        tensor = np.ascontiguousarray(params[name], dtype="<f4")
        encoded = name.encode("utf-8")
        chunks.append(struct.pack("<I", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack("<I", tensor.ndim))
        chunks.append(struct.pack(f"<{tensor.ndim}I", *tensor.shape))
        chunks.append(tensor.tobytes())
    path.write_bytes(b"".join(chunks))


class _Reader:
    def __init__(self, data):
        self.data = data
        self.pos = 0

    def take(self, n):
        if self.pos + n > len(self.data):
            raise CheckpointError("truncated checkpoint")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def u32(self):
        return struct.unpack("<I", self.take(4))[0]


def load_checkpoint(path):
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc

    r = _Reader(data)
    if r.take(4) != MAGIC:
        raise CheckpointError(f"{path} is not a model checkpoint (bad magic)")
    version = r.u32()
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version} (expected {VERSION})")

    try:
        header = json.loads(r.take(r.u32()).decode("utf-8"))
        config = ModelConfig.from_dict(header["config"])
    except (ValueError, KeyError, TypeError, UnicodeDecodeError) as exc:
        raise CheckpointError(f"corrupt checkpoint header: {exc}") from exc

    tensors = {}
    for _ in range(r.u32()):
        name = r.take(r.u32()).decode("utf-8")
        rank = r.u32()
        shape = tuple(r.u32() for _ in range(rank))
        count = int(np.prod(shape, dtype=np.int64)) if rank else 1
        raw = r.take(count * 4)
        tensors[name] = np.frombuffer(raw, dtype="<f4").reshape(shape).copy()
    if r.pos != len(data):
        raise CheckpointError(f"{len(data) - r.pos} trailing bytes after tensor data")

    reference = build_model(config, seed=0)
    if set(tensors) != set(reference.names()):
        missing = sorted(set(reference.names()) - set(tensors))
        extra = sorted(set(tensors) - set(reference.names()))
        raise CheckpointError(f"tensor names do not match config "
                              f"(missing {missing}, unexpected {extra})")
    for name in reference.names():
        if tensors[name].shape != reference[name].shape:
            raise CheckpointError(f"tensor {name} has shape {tensors[name].shape}, "
                                  f"config implies {reference[name].shape}")
    ordered = {name: tensors[name] for name in reference.names()}
    return ModelParams(config, ordered, metadata=header.get("metadata", {}))
