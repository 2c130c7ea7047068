"""Reverse-mode autodiff engine.

Define-by-run tape over dense float64 arrays: every op returns a new Value
holding its result, its parents and a closure that routes the incoming
gradient to those parents.  ``backward`` on a scalar loss topologically
sorts the tape and accumulates grads into every reachable Value that
requires them.  The tape is rebuilt on each forward pass, so recurrent
models just unroll.

Domain notes: ops raise ShapeError (naming the op and both shapes) on
incompatible operands, and every result is checked finite.  Kinked ops use
the usual subgradient conventions: relu'(0)=0, sqrt'(0)=0.
"""

from __future__ import annotations

import numpy as np

from ..errors import ShapeError

Array = np.ndarray


def _ensure_finite(op: str, data: Array) -> Array:
    if not np.all(np.isfinite(data)):
        raise FloatingPointError(f"{op} produced non-finite values")
    return data


def _unbroadcast(grad: Array, shape: tuple[int, ...]) -> Array:
    """Sum a broadcasted gradient back down to ``shape``."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


class Value:
    """A node on the tape: data, grad, parents and a backward closure."""

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward", "name")

    def __init__(self, data, requires_grad: bool = False, _parents: tuple = (),
                 _backward=None, name: str = ""):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: Array | None = None
        self.requires_grad = bool(requires_grad)
        self._parents = _parents
        self._backward = _backward
        self.name = name

    # -- bookkeeping --------------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    def __repr__(self):
        tag = f" name={self.name!r}" if self.name else ""
        return f"Value(shape={self.data.shape}{tag}, requires_grad={self.requires_grad})"

    def accumulate(self, g: Array) -> None:
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += g

    def zero_grad(self) -> None:
        self.grad = None

    def detach(self) -> "Value":
        return Value(self.data)

    def backward(self) -> None:
        """Fill grads of every reachable requires_grad Value; loss must be scalar."""
        if self.data.size != 1:
            raise ShapeError(f"backward: loss must be scalar, got shape {self.data.shape}")
        topo: list[Value] = []
        seen: set[int] = set()
        stack: list[tuple[Value, bool]] = [(self, False)]
        while stack:
            node, processed = stack.pop()
            if processed:
                topo.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if id(p) not in seen and p.requires_grad:
                    stack.append((p, False))
        self.accumulate(np.ones_like(self.data))
        for node in reversed(topo):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    # -- operator sugar ------------------------------------------------------

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return mul(self, -1.0)

    def __sub__(self, other):
        return add(self, mul(as_value(other), -1.0))

    def __rsub__(self, other):
        return add(as_value(other), mul(self, -1.0))

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, idx):
        return getitem(self, idx)


class Parameter(Value):
    """A named learnable leaf."""

    __slots__ = ()

    def __init__(self, data, name: str):
        super().__init__(data, requires_grad=True, name=name)


def as_value(x) -> Value:
    return x if isinstance(x, Value) else Value(x)


def backward(loss: Value) -> None:
    loss.backward()


def _make(op: str, data: Array, parents: tuple[Value, ...], bw) -> Value:
    req = any(p.requires_grad for p in parents)
    return Value(_ensure_finite(op, data), requires_grad=req,
                 _parents=parents if req else (), _backward=bw if req else None)


# ---------------------------------------------------------------------------
# Elementwise and structural primitives


def add(a, b) -> Value:
    a, b = as_value(a), as_value(b)
    try:
        data = a.data + b.data
    except ValueError:
        raise ShapeError(f"add: {a.shape} vs {b.shape}") from None

    def bw(g):
        if a.requires_grad:
            a.accumulate(_unbroadcast(g, a.data.shape))
        if b.requires_grad:
            b.accumulate(_unbroadcast(g, b.data.shape))

    return _make("add", data, (a, b), bw)


def mul(a, b) -> Value:
    a, b = as_value(a), as_value(b)
    try:
        data = a.data * b.data
    except ValueError:
        raise ShapeError(f"mul: {a.shape} vs {b.shape}") from None

    def bw(g):
        if a.requires_grad:
            a.accumulate(_unbroadcast(g * b.data, a.data.shape))
        if b.requires_grad:
            b.accumulate(_unbroadcast(g * a.data, b.data.shape))

    return _make("mul", data, (a, b), bw)


def matmul(a, b) -> Value:
    a, b = as_value(a), as_value(b)
    if a.data.ndim != 2 or b.data.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: {a.shape} @ {b.shape}")
    data = a.data @ b.data

    def bw(g):
        if a.requires_grad:
            a.accumulate(g @ b.data.T)
        if b.requires_grad:
            b.accumulate(a.data.T @ g)

    return _make("matmul", data, (a, b), bw)


def concat(values, axis: int = 0) -> Value:
    vals = [as_value(v) for v in values]
    try:
        data = np.concatenate([v.data for v in vals], axis=axis)
    except ValueError:
        raise ShapeError(f"concat: {[v.shape for v in vals]} along axis {axis}") from None
    sizes = [v.data.shape[axis] for v in vals]
    offsets = np.cumsum([0] + sizes)

    def bw(g):
        for v, lo, hi in zip(vals, offsets[:-1], offsets[1:]):
            if v.requires_grad:
                sl = [slice(None)] * g.ndim
                sl[axis] = slice(lo, hi)
                v.accumulate(g[tuple(sl)])

    return _make("concat", data, tuple(vals), bw)


def getitem(a: Value, idx) -> Value:
    data = a.data[idx]

    def bw(g):
        if a.requires_grad:
            full = np.zeros_like(a.data)
            np.add.at(full, idx, g)
            a.accumulate(full)

    return _make("slice", np.asarray(data), (a,), bw)


def reshape(a: Value, shape) -> Value:
    a = as_value(a)
    try:
        data = a.data.reshape(shape)
    except ValueError:
        raise ShapeError(f"reshape: {a.shape} -> {shape}") from None

    def bw(g):
        if a.requires_grad:
            a.accumulate(g.reshape(a.data.shape))

    return _make("reshape", data, (a,), bw)


def transpose(a: Value, axes=None) -> Value:
    a = as_value(a)
    data = np.transpose(a.data, axes)
    inv = None if axes is None else np.argsort(axes)

    def bw(g):
        if a.requires_grad:
            a.accumulate(np.transpose(g, inv))

    return _make("transpose", data, (a,), bw)


def broadcast_to(a: Value, shape) -> Value:
    a = as_value(a)
    try:
        data = np.broadcast_to(a.data, shape).copy()
    except ValueError:
        raise ShapeError(f"broadcast_to: {a.shape} -> {shape}") from None

    def bw(g):
        if a.requires_grad:
            a.accumulate(_unbroadcast(g, a.data.shape))

    return _make("broadcast_to", data, (a,), bw)


def sigmoid(a) -> Value:
    a = as_value(a)
    data = 1.0 / (1.0 + np.exp(-np.clip(a.data, -500, 500)))

    def bw(g):
        if a.requires_grad:
            a.accumulate(g * data * (1.0 - data))

    return _make("sigmoid", data, (a,), bw)


def tanh(a) -> Value:
    a = as_value(a)
    data = np.tanh(a.data)

    def bw(g):
        if a.requires_grad:
            a.accumulate(g * (1.0 - data * data))

    return _make("tanh", data, (a,), bw)


def relu(a) -> Value:
    a = as_value(a)
    data = np.maximum(a.data, 0.0)

    def bw(g):
        if a.requires_grad:
            a.accumulate(g * (a.data > 0.0))

    return _make("relu", data, (a,), bw)


def exp(a) -> Value:
    a = as_value(a)
    data = np.exp(a.data)

    def bw(g):
        if a.requires_grad:
            a.accumulate(g * data)

    return _make("exp", data, (a,), bw)


def sqrt(a) -> Value:
    a = as_value(a)
    if np.any(a.data < 0):
        raise FloatingPointError("sqrt: negative input")
    data = np.sqrt(a.data)

    def bw(g):
        if a.requires_grad:
            a.accumulate(g * np.where(data > 0.0, 0.5 / np.where(data > 0.0, data, 1.0), 0.0))

    return _make("sqrt", data, (a,), bw)


def vsum(a, axis=None, keepdims: bool = False) -> Value:
    a = as_value(a)
    data = a.data.sum(axis=axis, keepdims=keepdims)

    def bw(g):
        if a.requires_grad:
            gg = g
            if axis is not None and not keepdims:
                gg = np.expand_dims(g, axis)
            a.accumulate(np.broadcast_to(gg, a.data.shape).copy())

    return _make("sum", np.asarray(data), (a,), bw)


def mean(a, axis=None, keepdims: bool = False) -> Value:
    a = as_value(a)
    n = a.data.size if axis is None else np.prod([a.data.shape[ax] for ax in
                                                  (axis if isinstance(axis, tuple) else (axis,))])
    return mul(vsum(a, axis=axis, keepdims=keepdims), 1.0 / float(n))


def mse(a, b) -> Value:
    """Mean squared error between same-shape values."""
    a, b = as_value(a), as_value(b)
    if a.shape != b.shape:
        raise ShapeError(f"mse: {a.shape} vs {b.shape}")
    d = a - b
    return mean(mul(d, d))


def softmax_cross_entropy(logits: Value, targets: np.ndarray) -> Value:
    """Mean cross-entropy of integer targets under softmax(logits).

    Log-sum-exp stabilized; logits (N, K), targets (N,) ints in [0, K).
    """
    logits = as_value(logits)
    t = np.asarray(targets)
    if logits.data.ndim != 2 or t.ndim != 1 or t.shape[0] != logits.shape[0]:
        raise ShapeError(f"softmax_cross_entropy: logits {logits.shape}, targets {t.shape}")
    n, k = logits.shape
    if t.size and (t.min() < 0 or t.max() >= k):
        raise ValueError(f"softmax_cross_entropy: target outside 0..{k - 1}")
    z = logits.data - logits.data.max(axis=1, keepdims=True)
    ez = np.exp(z)
    soft = ez / ez.sum(axis=1, keepdims=True)
    ce = float(np.mean(np.log(ez.sum(axis=1)) - z[np.arange(n), t]))

    def bw(g):
        if logits.requires_grad:
            gg = soft.copy()
            gg[np.arange(n), t] -= 1.0
            logits.accumulate(float(g) * gg / n)

    return _make("softmax_cross_entropy", np.float64(ce), (logits,), bw)


def inv_sqrt_guard(a: Value, eps: float = 1e-12) -> Value:
    """Elementwise d^(-1/2) with 0 where d <= eps (degree normalization guard)."""
    a = as_value(a)
    ok = a.data > eps
    data = np.where(ok, 1.0 / np.sqrt(np.where(ok, a.data, 1.0)), 0.0)

    def bw(g):
        if a.requires_grad:
            a.accumulate(g * np.where(ok, -0.5 * data / np.where(ok, a.data, 1.0), 0.0))

    return _make("inv_sqrt_guard", data, (a,), bw)


def scatter_matrix(vals: Value, rows: np.ndarray, cols: np.ndarray, n: int) -> Value:
    """Dense (n, n) matrix with vals[k] at (rows[k], cols[k]), zeros elsewhere."""
    vals = as_value(vals)
    if vals.data.ndim != 1 or len(rows) != vals.size or len(cols) != vals.size:
        raise ShapeError(f"scatter_matrix: vals {vals.shape}, {len(rows)} rows, {len(cols)} cols")
    data = np.zeros((n, n))
    np.add.at(data, (rows, cols), vals.data)

    def bw(g):
        if vals.requires_grad:
            vals.accumulate(g[rows, cols])

    return _make("scatter_matrix", data, (vals,), bw)


def take_time(seq: Value, idx: np.ndarray) -> Value:
    """Gather seq[idx[n], n, :] from a (T, N, H) sequence -> (N, H)."""
    seq = as_value(seq)
    t = np.asarray(idx, int)
    if seq.data.ndim != 3 or t.shape != (seq.shape[1],):
        raise ShapeError(f"take_time: seq {seq.shape}, idx {t.shape}")
    cols = np.arange(seq.shape[1])
    data = seq.data[t, cols, :]

    def bw(g):
        if seq.requires_grad:
            full = np.zeros_like(seq.data)
            np.add.at(full, (t, cols), g)
            seq.accumulate(full)

    return _make("take_time", data, (seq,), bw)


# ---------------------------------------------------------------------------
# Convolutional primitives (stride 1, zero padding)


def conv2d(x: Value, w: Value, b: Value | None = None, padding: int = 0) -> Value:
    x, w = as_value(x), as_value(w)
    if x.data.ndim != 4 or w.data.ndim != 4 or x.shape[1] != w.shape[1]:
        raise ShapeError(f"conv2d: x {x.shape}, w {w.shape}")
    n, cin, h, wd = x.shape
    cout, _, kh, kw = w.shape
    p = padding
    xp = np.pad(x.data, ((0, 0), (0, 0), (p, p), (p, p)))
    if xp.shape[2] < kh or xp.shape[3] < kw:
        raise ShapeError(f"conv2d: kernel {w.shape} larger than padded input {xp.shape}")
    win = np.lib.stride_tricks.sliding_window_view(xp, (kh, kw), axis=(2, 3))
    # win: (N, Cin, Ho, Wo, kh, kw)
    data = np.tensordot(win, w.data, axes=([1, 4, 5], [1, 2, 3]))  # (N, Ho, Wo, Cout)
    data = np.moveaxis(data, 3, 1)
    bias = as_value(b) if b is not None else None
    if bias is not None:
        if bias.shape != (cout,):
            raise ShapeError(f"conv2d: bias {bias.shape} for {cout} channels")
        data = data + bias.data.reshape(1, cout, 1, 1)
    ho, wo = data.shape[2], data.shape[3]

    def bw(g):
        if w.requires_grad:
            dw = np.tensordot(g, win, axes=([0, 2, 3], [0, 2, 3]))  # (Cout, Cin, kh, kw)
            w.accumulate(dw)
        if bias is not None and bias.requires_grad:
            bias.accumulate(g.sum(axis=(0, 2, 3)))
        if x.requires_grad:
            dxp = np.zeros_like(xp)
            for i in range(kh):
                for j in range(kw):
                    # (N, Ho, Wo, Cin) contribution through kernel tap (i, j)
                    contrib = np.tensordot(g, w.data[:, :, i, j], axes=([1], [0]))
                    dxp[:, :, i:i + ho, j:j + wo] += np.moveaxis(contrib, 3, 1)
            x.accumulate(dxp[:, :, p:p + h, p:p + wd] if p else dxp)

    parents = (x, w) + ((bias,) if bias is not None else ())
    return _make("conv2d", data, parents, bw)


def avg_pool2d(x: Value, k: int = 2) -> Value:
    x = as_value(x)
    if x.data.ndim != 4 or x.shape[2] % k or x.shape[3] % k:
        raise ShapeError(f"avg_pool2d: {x.shape} not divisible by {k}")
    n, c, h, w = x.shape
    data = x.data.reshape(n, c, h // k, k, w // k, k).mean(axis=(3, 5))

    def bw(g):
        if x.requires_grad:
            gg = np.repeat(np.repeat(g, k, axis=2), k, axis=3) / (k * k)
            x.accumulate(gg)

    return _make("avg_pool2d", data, (x,), bw)


def upsample2x(x: Value) -> Value:
    x = as_value(x)
    if x.data.ndim != 4:
        raise ShapeError(f"upsample2x: expected 4-d, got {x.shape}")
    data = np.repeat(np.repeat(x.data, 2, axis=2), 2, axis=3)

    def bw(g):
        if x.requires_grad:
            n, c, h, w = g.shape
            x.accumulate(g.reshape(n, c, h // 2, 2, w // 2, 2).sum(axis=(3, 5)))

    return _make("upsample2x", data, (x,), bw)
