"""Checkpoint serialization.

One format for every model: a magic string, a length-prefixed JSON manifest
(metadata dict plus an ordered entry list of names and shapes), then the raw
little-endian float64 blobs concatenated in entry order.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..errors import CheckpointError

MAGIC = b"SKSEMCKPT1\n"


def save_checkpoint(path: str | Path, arrays: dict[str, np.ndarray],
                    meta: dict | None = None) -> None:
    entries = [{"name": k, "shape": list(np.asarray(v).shape)} for k, v in arrays.items()]
    manifest = json.dumps({"meta": meta or {}, "entries": entries},
                          sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", len(manifest)))
        fh.write(manifest)
        for v in arrays.values():
            fh.write(np.ascontiguousarray(v, dtype="<f8").tobytes())


def load_checkpoint(path: str | Path) -> tuple[dict[str, np.ndarray], dict]:
    raw = Path(path).read_bytes()
    if not raw.startswith(MAGIC):
        raise CheckpointError(f"{path}: not a checkpoint (bad magic)")
    off = len(MAGIC)
    if len(raw) < off + 8:
        raise CheckpointError(f"{path}: truncated header")
    (mlen,) = struct.unpack_from("<Q", raw, off)
    off += 8
    try:
        manifest = json.loads(raw[off:off + mlen])
    except json.JSONDecodeError as e:
        raise CheckpointError(f"{path}: bad manifest: {e}") from None
    off += mlen
    arrays: dict[str, np.ndarray] = {}
    for entry in manifest["entries"]:
        shape = tuple(entry["shape"])
        n = int(np.prod(shape)) if shape else 1
        end = off + 8 * n
        if end > len(raw):
            raise CheckpointError(f"{path}: truncated data for {entry['name']!r}")
        arrays[entry["name"]] = np.frombuffer(
            raw[off:end], dtype="<f8").reshape(shape).astype(np.float64)
        off = end
    if off != len(raw):
        raise CheckpointError(f"{path}: {len(raw) - off} trailing bytes")
    return arrays, manifest.get("meta", {})
