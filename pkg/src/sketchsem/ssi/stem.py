"""Graph aggregation and stroke classification.

TAGConv-style propagation on the normalized stroke adjacency: each layer
mixes powers of the adjacency up to H hops, X' = relu(sum_h A^h X Theta_h),
so information travels several strokes per layer.  Two layers feed a small
classifier head over the 22 categories.
"""

from __future__ import annotations

import numpy as np

from ..autodiff import Parameter, Value, add, matmul, relu
from ..autodiff.seeding import child_rng
from ..categories import N_CATEGORIES
from ..errors import ShapeError
from .graph import StrokeGraph, normalized_adjacency


class Linear:
    def __init__(self, n_in: int, n_out: int, rng: np.random.Generator, name: str,
                 gain: float = 1.0):
        # Kaiming-style bound: gain sqrt(6) for relu-followed layers keeps
        # activation scale from shrinking layer over layer
        s = gain / np.sqrt(n_in)
        self.w = Parameter(rng.uniform(-s, s, (n_in, n_out)), f"{name}.w")
        self.b = Parameter(np.zeros((1, n_out)), f"{name}.b")

    @property
    def params(self) -> list[Parameter]:
        return [self.w, self.b]

    def __call__(self, x: Value) -> Value:
        return add(matmul(x, self.w), self.b)


class Mlp:
    """Linear stack with relu between layers and optional relu on the output."""

    def __init__(self, dims: list[int], rng: np.random.Generator, name: str,
                 relu_out: bool = False):
        last = len(dims) - 2
        self.layers = [Linear(dims[i], dims[i + 1], rng, f"{name}.{i}",
                              gain=1.0 if i == last and not relu_out else np.sqrt(6))
                       for i in range(len(dims) - 1)]
        self.relu_out = relu_out

    @property
    def params(self) -> list[Parameter]:
        return [p for layer in self.layers for p in layer.params]

    def __call__(self, x: Value) -> Value:
        for i, layer in enumerate(self.layers):
            x = layer(x)
            if i < len(self.layers) - 1 or self.relu_out:
                x = relu(x)
        return x


class TagConvLayer:
    """One propagation layer: sum over hops 0..H of A^h X Theta_h, plus bias."""

    def __init__(self, n_in: int, n_out: int, hops: int,
                 rng: np.random.Generator, name: str, activation: str = "relu"):
        if hops < 0:
            raise ValueError(f"hops must be >= 0, got {hops}")
        # hop terms add independent variance, so fan-in counts all of them;
        # sqrt(6) gain for the relu that follows
        s = np.sqrt(6.0 / (n_in * (hops + 1)))
        self.hops = hops
        self.activation = activation
        self.thetas = [Parameter(rng.uniform(-s, s, (n_in, n_out)), f"{name}.theta{h}")
                       for h in range(hops + 1)]
        self.bias = Parameter(np.zeros((1, n_out)), f"{name}.b")

    @property
    def params(self) -> list[Parameter]:
        return self.thetas + [self.bias]

    def __call__(self, adj: Value, x: Value) -> Value:
        if adj.shape[0] != x.shape[0]:
            raise ShapeError(f"tagconv: adjacency {adj.shape} vs features {x.shape}")
        out = add(matmul(x, self.thetas[0]), self.bias)
        x_h = x
        for h in range(1, self.hops + 1):
            x_h = matmul(adj, x_h)
            out = add(out, matmul(x_h, self.thetas[h]))
        if self.activation == "relu":
            return relu(out)
        return out


def tagconv_forward(graph: StrokeGraph | Value, x: Value, layer: TagConvLayer) -> Value:
    """Apply one graph-conv layer; accepts a StrokeGraph or a ready adjacency."""
    adj = normalized_adjacency(graph) if isinstance(graph, StrokeGraph) else graph
    return layer(adj, x)


class StemModel:
    """Edge-weight MLP + 2 graph-conv layers + classifier over 22 classes."""

    def __init__(self, feature_dim: int = 128, width: int = 64, hops: int = 3,
                 rng: np.random.Generator | None = None):
        rng = rng if rng is not None else child_rng(0, "stem", "init")
        self.feature_dim = feature_dim
        self.width = width
        self.hops = hops
        self.edge_mlp = Mlp([4, 32, 1], rng, "stem.edge", relu_out=True)
        self.tag1 = TagConvLayer(feature_dim, width, hops, rng, "stem.tag1")
        self.tag2 = TagConvLayer(width, width, hops, rng, "stem.tag2")
        self.head = Mlp([width, width, N_CATEGORIES], rng, "stem.head")

    @property
    def params(self) -> list[Parameter]:
        return (self.edge_mlp.params + self.tag1.params + self.tag2.params
                + self.head.params)

    def logits(self, graph: StrokeGraph, features: Value) -> Value:
        adj = normalized_adjacency(graph)
        x = tagconv_forward(adj, features, self.tag1)
        x = tagconv_forward(adj, x, self.tag2)
        return self.head(x)

    def state_arrays(self) -> dict[str, np.ndarray]:
        return {p.name: p.data for p in self.params}

    def load_state(self, arrays: dict[str, np.ndarray]) -> None:
        for p in self.params:
            p.data = np.array(arrays[p.name], np.float64)
