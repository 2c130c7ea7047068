from .checkpoint import load_checkpoint, save_checkpoint
from .core import (
    Parameter,
    Value,
    add,
    as_value,
    avg_pool2d,
    backward,
    broadcast_to,
    concat,
    conv2d,
    exp,
    getitem,
    inv_sqrt_guard,
    matmul,
    mean,
    mse,
    mul,
    relu,
    reshape,
    scatter_matrix,
    sigmoid,
    softmax_cross_entropy,
    sqrt,
    take_time,
    tanh,
    transpose,
    upsample2x,
    vsum,
)
from .gradcheck import grad_check
from .gru import GruLayer, GruStack, gru_sequence
from .optim import Adam, OptimizerState, adam_step
from .seeding import child_rng, root_seed

__all__ = [
    "Adam", "GruLayer", "GruStack", "OptimizerState", "Parameter", "Value",
    "adam_step", "add", "as_value", "avg_pool2d", "backward", "broadcast_to",
    "child_rng", "concat", "conv2d", "exp", "getitem", "grad_check",
    "gru_sequence", "inv_sqrt_guard", "load_checkpoint", "matmul", "mean",
    "mse", "mul", "relu", "reshape", "root_seed", "save_checkpoint",
    "scatter_matrix", "sigmoid", "softmax_cross_entropy", "sqrt", "take_time",
    "tanh", "transpose", "upsample2x", "vsum",
]
