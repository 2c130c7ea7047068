"""Deterministic seed fan-out.

One root seed (env override SKETCHSEM_SEED) feeds every component through
named children, so independent pieces of the system never share or race a
generator and every run is reproducible from a single number.
"""

from __future__ import annotations

import os
from zlib import crc32

import numpy as np

ENV_SEED = "SKETCHSEM_SEED"
DEFAULT_ROOT_SEED = 0


def root_seed(explicit: int | None = None) -> int:
    """Explicit seed if given, else the env override, else the default."""
    if explicit is not None:
        return int(explicit)
    env = os.environ.get(ENV_SEED)
    return int(env) if env else DEFAULT_ROOT_SEED


def child_rng(root: int, *path: str | int) -> np.random.Generator:
    """Named child generator: same (root, path) -> same stream, always."""
    key = tuple(crc32(str(p).encode()) for p in path)
    return np.random.Generator(np.random.Philox(
        np.random.SeedSequence(entropy=int(root), spawn_key=key)))
