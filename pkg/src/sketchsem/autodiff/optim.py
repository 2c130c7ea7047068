"""Adam optimizer with a per-epoch learning-rate decay schedule."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Parameter


@dataclass
class OptimizerState:
    """Adam moments plus the lr schedule (base lr scaled by gamma^epoch)."""

    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    gamma: float = 1.0  # per-epoch decay; 1.0 = constant lr
    epoch: int = 0
    step_count: int = 0
    m: dict[int, np.ndarray] = field(default_factory=dict)
    v: dict[int, np.ndarray] = field(default_factory=dict)

    @property
    def effective_lr(self) -> float:
        return self.lr * self.gamma ** self.epoch


def adam_step(state: OptimizerState, params: list[Parameter]) -> None:
    """One Adam update from the grads stored on ``params``.

    Parameters with no grad (or an all-zero grad and fresh moments) are
    left untouched.
    """
    state.step_count += 1
    t = state.step_count
    lr = state.effective_lr
    b1, b2 = state.beta1, state.beta2
    for i, p in enumerate(params):
        if p.grad is None:
            continue
        m = state.m.setdefault(i, np.zeros_like(p.data))
        v = state.v.setdefault(i, np.zeros_like(p.data))
        m += (1 - b1) * (p.grad - m)
        v += (1 - b2) * (p.grad * p.grad - v)
        mhat = m / (1 - b1 ** t)
        vhat = v / (1 - b2 ** t)
        p.data = p.data - lr * mhat / (np.sqrt(vhat) + state.eps)


class Adam:
    """Convenience wrapper owning an OptimizerState for a parameter list."""

    def __init__(self, params: list[Parameter], lr: float = 0.001,
                 betas: tuple[float, float] = (0.9, 0.999), eps: float = 1e-8,
                 gamma: float = 1.0):
        self.params = list(params)
        self.state = OptimizerState(lr=lr, beta1=betas[0], beta2=betas[1],
                                    eps=eps, gamma=gamma)

    def set_epoch(self, epoch: int) -> None:
        self.state.epoch = epoch

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()

    def step(self) -> None:
        adam_step(self.state, self.params)
