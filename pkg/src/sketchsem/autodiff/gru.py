"""Fused GRU sequence layer.

One tape node per layer per direction: the whole unrolled recurrence runs
in numpy in the forward pass, and the backward closure replays it in
reverse (BPTT) from cached gates.  Cell convention, with gates r, z and
candidate n:

    r_t = sigmoid(x_t Wih[r] + b_ih[r] + h_{t-1} Whh[r] + b_hh[r])
    z_t = sigmoid(x_t Wih[z] + b_ih[z] + h_{t-1} Whh[z] + b_hh[z])
    n_t = tanh(x_t Wih[n] + b_ih[n] + r_t * (h_{t-1} Whh[n] + b_hh[n]))
    h_t = (1 - z_t) * h_{t-1} + z_t * n_t

Variable-length batches use a step mask: past a sequence's end the hidden
state is carried unchanged, so the state at index length-1 is final.
"""

from __future__ import annotations

import numpy as np

from ..errors import ShapeError
from .core import Parameter, Value, _make, as_value


def _sig(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(x, -500, 500)))


def gru_sequence(x: Value, lengths: np.ndarray, wih: Value, whh: Value,
                 b_ih: Value, b_hh: Value) -> Value:
    """Run a GRU over (T, N, I) input; returns the (T, N, H) state sequence."""
    x = as_value(x)
    if x.data.ndim != 3:
        raise ShapeError(f"gru_sequence: input {x.shape}, expected (T, N, I)")
    t_len, n, i_dim = x.shape
    hidden = whh.shape[0]
    if wih.shape != (i_dim, 3 * hidden) or whh.shape != (hidden, 3 * hidden) \
            or b_ih.shape != (3 * hidden,) or b_hh.shape != (3 * hidden,):
        raise ShapeError(
            f"gru_sequence: weights {wih.shape}/{whh.shape}/{b_ih.shape}/{b_hh.shape} "
            f"for input dim {i_dim}, hidden {hidden}")
    lengths = np.asarray(lengths, int)
    if lengths.shape != (n,) or lengths.min(initial=1) < 1 or lengths.max(initial=1) > t_len:
        raise ShapeError(f"gru_sequence: lengths {lengths.shape} invalid for (T={t_len}, N={n})")

    h = hidden
    mask = (np.arange(t_len)[:, None] < lengths[None, :]).astype(np.float64)[:, :, None]
    rr = np.empty((t_len, n, h))
    zz = np.empty((t_len, n, h))
    nn = np.empty((t_len, n, h))
    ghn = np.empty((t_len, n, h))
    hs = np.zeros((t_len + 1, n, h))  # hs[t] = state entering step t

    gi_all = x.data.reshape(t_len * n, i_dim) @ wih.data + b_ih.data
    gi_all = gi_all.reshape(t_len, n, 3 * h)
    for t in range(t_len):
        gh = hs[t] @ whh.data + b_hh.data
        gi = gi_all[t]
        r = _sig(gi[:, :h] + gh[:, :h])
        z = _sig(gi[:, h:2 * h] + gh[:, h:2 * h])
        cand = np.tanh(gi[:, 2 * h:] + r * gh[:, 2 * h:])
        h_new = (1.0 - z) * hs[t] + z * cand
        m = mask[t]
        hs[t + 1] = m * h_new + (1.0 - m) * hs[t]
        rr[t], zz[t], nn[t], ghn[t] = r, z, cand, gh[:, 2 * h:]

    out = hs[1:]

    def bw(g):
        dwih = np.zeros_like(wih.data) if wih.requires_grad else None
        dwhh = np.zeros_like(whh.data) if whh.requires_grad else None
        dbih = np.zeros_like(b_ih.data) if b_ih.requires_grad else None
        dbhh = np.zeros_like(b_hh.data) if b_hh.requires_grad else None
        dx = np.zeros_like(x.data) if x.requires_grad else None
        carry = np.zeros((n, h))
        for t in range(t_len - 1, -1, -1):
            dh = g[t] + carry
            m = mask[t]
            dh_new = m * dh
            r, z, cand, gh_n, h_prev = rr[t], zz[t], nn[t], ghn[t], hs[t]
            dz = dh_new * (cand - h_prev)
            dn = dh_new * z
            dh_prev = dh_new * (1.0 - z) + (1.0 - m) * dh
            dn_pre = dn * (1.0 - cand * cand)
            dgh_n = dn_pre * r
            dr = dn_pre * gh_n
            dz_pre = dz * z * (1.0 - z)
            dr_pre = dr * r * (1.0 - r)
            dgi = np.concatenate([dr_pre, dz_pre, dn_pre], axis=1)
            dgh = np.concatenate([dr_pre, dz_pre, dgh_n], axis=1)
            if dx is not None:
                dx[t] = dgi @ wih.data.T
            if dwih is not None:
                dwih += x.data[t].T @ dgi
            if dbih is not None:
                dbih += dgi.sum(axis=0)
            if dwhh is not None:
                dwhh += h_prev.T @ dgh
            if dbhh is not None:
                dbhh += dgh.sum(axis=0)
            carry = dh_prev + dgh @ whh.data.T
        if dx is not None:
            x.accumulate(dx)
        if dwih is not None:
            wih.accumulate(dwih)
        if dwhh is not None:
            whh.accumulate(dwhh)
        if dbih is not None:
            b_ih.accumulate(dbih)
        if dbhh is not None:
            b_hh.accumulate(dbhh)

    return _make("gru_sequence", out, (x, wih, whh, b_ih, b_hh), bw)


class GruLayer:
    """Owns one layer's parameters; callable on a (T, N, I) sequence."""

    def __init__(self, in_dim: int, hidden: int, rng: np.random.Generator, name: str):
        s = 1.0 / np.sqrt(hidden)
        self.in_dim, self.hidden = in_dim, hidden
        self.wih = Parameter(rng.uniform(-s, s, (in_dim, 3 * hidden)), f"{name}.wih")
        self.whh = Parameter(rng.uniform(-s, s, (hidden, 3 * hidden)), f"{name}.whh")
        self.b_ih = Parameter(np.zeros(3 * hidden), f"{name}.b_ih")
        self.b_hh = Parameter(np.zeros(3 * hidden), f"{name}.b_hh")

    @property
    def params(self) -> list[Parameter]:
        return [self.wih, self.whh, self.b_ih, self.b_hh]

    def __call__(self, x: Value, lengths: np.ndarray) -> Value:
        return gru_sequence(x, lengths, self.wih, self.whh, self.b_ih, self.b_hh)


class GruStack:
    """Stacked unidirectional GRU layers (layer l feeds layer l+1)."""

    def __init__(self, in_dim: int, hidden: int, layers: int,
                 rng: np.random.Generator, name: str):
        dims = [in_dim] + [hidden] * layers
        self.layers = [GruLayer(dims[i], hidden, rng, f"{name}.l{i}")
                       for i in range(layers)]

    @property
    def params(self) -> list[Parameter]:
        return [p for layer in self.layers for p in layer.params]

    def __call__(self, x: Value, lengths: np.ndarray) -> Value:
        for layer in self.layers:
            x = layer(x, lengths)
        return x
