"""Finite-difference gradient verification."""

from __future__ import annotations

import numpy as np

from .core import Value

SUBSET_THRESHOLD = 10_000  # above this many coordinates, check a seeded subset


def grad_check(f, params: list[Value], step: float = 1e-4,
               max_coords: int = 2000, seed: int = 0) -> float:
    """Max relative error between backward grads and central differences.

    ``f`` is a deterministic scalar function of ``params`` (called with no
    arguments; it closes over them).  Every coordinate is checked unless the
    total exceeds 10^4, in which case a seeded random subset of
    ``max_coords`` coordinates is drawn.  Relative error uses
    |analytic - numeric| / max(|analytic|, |numeric|, 1).
    """
    for p in params:
        p.zero_grad()
    loss = f()
    loss.backward()
    grads = [np.zeros_like(p.data) if p.grad is None else p.grad.copy() for p in params]

    coords = [(i, j) for i, p in enumerate(params) for j in range(p.data.size)]
    if len(coords) > SUBSET_THRESHOLD:
        rng = np.random.default_rng(seed)
        pick = rng.choice(len(coords), size=min(max_coords, len(coords)), replace=False)
        coords = [coords[k] for k in sorted(pick)]

    worst = 0.0
    for i, j in coords:
        idx = np.unravel_index(j, params[i].data.shape)
        orig = params[i].data[idx]
        params[i].data[idx] = orig + step
        f_plus = float(f().data)
        params[i].data[idx] = orig - step
        f_minus = float(f().data)
        params[i].data[idx] = orig
        numeric = (f_plus - f_minus) / (2 * step)
        analytic = float(grads[i].reshape(-1)[j])
        err = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1.0)
        worst = max(worst, err)
    return worst
