"""Reconstruction losses for embedding training.

Five terms: pixel distance, perceptual distance, semantic feature matching
under the frozen segmenter, and two latent regularizers pulling the coarse
and fine code rows toward the average code with separate weights.
"""

from __future__ import annotations

from ..autodiff import Value, add, as_value, mse, mul, sqrt, vsum
from ..errors import ShapeError
from .codes import N_SKETCH_ROWS, N_STYLE_ROWS

DEFAULT_LAMBDAS = (0.1, 0.8, 1.0, 0.00025, 0.0025)


def _norm(diff: Value) -> Value:
    return sqrt(vsum(mul(diff, diff)))


def loss_l2(x, x_hat) -> Value:
    """Root of the mean squared pixel difference (resolution-independent)."""
    return sqrt(mse(x, x_hat))


def loss_lpips(x, x_hat, pnet) -> Value:
    """Perceptual distance: feature norms summed over pyramid stages."""
    total = None
    for fx, fy in zip(pnet.features(as_value(x)), pnet.features(as_value(x_hat))):
        term = _norm(fx - fy)
        total = term if total is None else add(total, term)
    return total


def loss_sfm(x, x_hat, segnet) -> Value:
    """Semantic feature matching: per-stage norms scaled by 1/(C*H*W)."""
    total = None
    for fx, fy in zip(segnet.features(as_value(x)), segnet.features(as_value(x_hat))):
        c, h, w = fx.shape[-3:]
        term = mul(_norm(fx - fy), 1.0 / float(c * h * w))
        total = term if total is None else add(total, term)
    return total


def loss_reg_weighted(w: Value, w_bar: Value) -> tuple[Value, Value]:
    """Norms of (w - w_bar) over the sketch rows and the appearance rows.

    Accepts (18, D) or batched (N, 18, D) codes.
    """
    w = as_value(w)
    if w.shape[-2] != N_STYLE_ROWS:
        raise ShapeError(f"loss_reg_weighted: want {N_STYLE_ROWS} rows, got {w.shape}")
    dev = w - w_bar
    if dev.data.ndim == 2:
        coarse, fine = dev[:N_SKETCH_ROWS], dev[N_SKETCH_ROWS:]
    else:
        coarse, fine = dev[:, :N_SKETCH_ROWS], dev[:, N_SKETCH_ROWS:]
    return _norm(coarse), _norm(fine)


def loss_total(x, x_hat, w, w_bar, pnet, segnet,
               lambdas: tuple[float, ...] = DEFAULT_LAMBDAS) -> Value:
    """l1*L2 + l2*LPIPS + l3*SFM + l4*Reg_coarse + l5*Reg_fine."""
    l1, l2, l3, l4, l5 = lambdas
    coarse, fine = loss_reg_weighted(w, w_bar)
    total = mul(loss_l2(x, x_hat), l1)
    total = add(total, mul(loss_lpips(x, x_hat, pnet), l2))
    total = add(total, mul(loss_sfm(x, x_hat, segnet), l3))
    total = add(total, mul(coarse, l4))
    return add(total, mul(fine, l5))
