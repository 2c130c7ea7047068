"""GRU layer against a literal step-by-step recurrence oracle."""

import numpy as np

from sketchsem.autodiff import GruLayer, GruStack, Parameter, Value, grad_check, mean, mul
from sketchsem.autodiff.gru import gru_sequence


def _sig(x):
    return 1.0 / (1.0 + np.exp(-x))


def unrolled_oracle(x, lengths, wih, whh, b_ih, b_hh):
    """Independent per-sample, per-step transcription of the cell equations."""
    t_len, n, _ = x.shape
    h_dim = whh.shape[0]
    h = np.zeros((n, h_dim))
    out = np.zeros((t_len, n, h_dim))
    for t in range(t_len):
        for k in range(n):
            if t < lengths[k]:
                gi = x[t, k] @ wih + b_ih
                gh = h[k] @ whh + b_hh
                r = _sig(gi[:h_dim] + gh[:h_dim])
                z = _sig(gi[h_dim:2 * h_dim] + gh[h_dim:2 * h_dim])
                cand = np.tanh(gi[2 * h_dim:] + r * gh[2 * h_dim:])
                h[k] = (1 - z) * h[k] + z * cand
            out[t, k] = h[k]
    return out


def _layer(rng, in_dim=2, hidden=5):
    return GruLayer(in_dim, hidden, rng, "g")


class TestForward:
    def test_matches_unrolled_recurrence(self):
        rng = np.random.default_rng(5)
        layer = _layer(rng)
        x = rng.standard_normal((7, 4, 2))
        lengths = np.array([7, 3, 1, 5])
        got = layer(Value(x), lengths).data
        want = unrolled_oracle(x, lengths, layer.wih.data, layer.whh.data,
                               layer.b_ih.data, layer.b_hh.data)
        assert np.max(np.abs(got - want)) < 1e-12

    def test_zero_weights_fixed_point(self):
        rng = np.random.default_rng(0)
        layer = _layer(rng)
        for p in layer.params:
            p.data[...] = 0.0
        out = layer(Value(rng.standard_normal((4, 3, 2))), np.array([4, 4, 2]))
        assert np.array_equal(out.data, np.zeros_like(out.data))

    def test_state_frozen_past_length(self):
        rng = np.random.default_rng(9)
        layer = _layer(rng)
        x = rng.standard_normal((6, 2, 2))
        out = layer(Value(x), np.array([3, 6])).data
        assert np.array_equal(out[2, 0], out[5, 0])  # sample 0 ended at t=2
        assert not np.array_equal(out[2, 1], out[5, 1])

    def test_padding_independent(self):
        rng = np.random.default_rng(3)
        layer = _layer(rng)
        x = rng.standard_normal((5, 1, 2))
        full = layer(Value(x), np.array([3])).data[2, 0]
        trimmed = layer(Value(x[:3]), np.array([3])).data[2, 0]
        assert np.max(np.abs(full - trimmed)) < 1e-15

    def test_single_step(self):
        rng = np.random.default_rng(8)
        layer = _layer(rng)
        out = layer(Value(rng.standard_normal((1, 1, 2))), np.array([1]))
        assert out.shape == (1, 1, 5) and np.all(np.isfinite(out.data))


class TestBackward:
    def test_layer_grad_check(self):
        rng = np.random.default_rng(11)
        layer = _layer(rng, in_dim=3, hidden=4)
        x = Parameter(rng.standard_normal((5, 3, 3)), "x")
        lengths = np.array([5, 2, 4])

        def f():
            out = layer(x, lengths)
            return mean(mul(out, out))

        assert grad_check(f, layer.params + [x]) < 1e-4

    def test_stack_grad_check(self):
        rng = np.random.default_rng(13)
        stack = GruStack(2, 3, layers=3, rng=rng, name="s")
        x = Parameter(rng.standard_normal((4, 2, 2)), "x")
        lengths = np.array([4, 3])

        def f():
            out = stack(x, lengths)
            return mean(mul(out, out))

        assert grad_check(f, stack.params + [x]) < 1e-4

    def test_grad_flows_only_into_used_steps(self):
        rng = np.random.default_rng(17)
        layer = _layer(rng)
        x = Parameter(rng.standard_normal((4, 1, 2)), "x")
        out = layer(x, np.array([2]))
        mean(mul(out, out)).backward()
        # steps beyond the length never touch the input
        assert np.array_equal(x.grad[2:], np.zeros_like(x.grad[2:]))
        assert np.abs(x.grad[:2]).sum() > 0


def test_reused_layer_accumulates():
    rng = np.random.default_rng(21)
    layer = _layer(rng)
    x = rng.standard_normal((3, 2, 2))

    def f():
        a = layer(Value(x), np.array([3, 3]))
        b = layer(Value(x[::-1].copy()), np.array([3, 3]))
        return mean(mul(a, a)) + mean(mul(b, b))

    assert grad_check(f, layer.params) < 1e-4


def test_fused_op_shape_validation():
    import pytest

    from sketchsem.errors import ShapeError
    rng = np.random.default_rng(2)
    layer = _layer(rng)
    with pytest.raises(ShapeError):
        gru_sequence(Value(rng.standard_normal((3, 2))), np.array([3, 3]),
                     layer.wih, layer.whh, layer.b_ih, layer.b_hh)
    with pytest.raises(ShapeError):
        layer(Value(rng.standard_normal((3, 2, 2))), np.array([4, 3]))
