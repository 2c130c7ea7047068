"""Stroke-labeling tests: graph construction, graph conv, encoder, training.

The graph-conv layer is checked against a dense matrix-power oracle and the
whole labeling pipeline against central finite differences.
"""

from __future__ import annotations

import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sketchsem import Point, Stroke, VectorSketch, reverse
from sketchsem.autodiff import Value, softmax_cross_entropy
from sketchsem.autodiff.checkpoint import save_checkpoint
from sketchsem.autodiff.gradcheck import grad_check
from sketchsem.autodiff.seeding import child_rng
from sketchsem.errors import CheckpointError, CoincidentCentroids, EmptyStroke
from sketchsem.ssi import (
    SsemModel,
    SsiConfig,
    StemModel,
    StrokeGraph,
    angle,
    augmented_items,
    build_graph,
    classify,
    edge_features,
    knn_edges,
    label_sketch,
    load_ssi,
    merge_graphs,
    normalized_adjacency,
    save_ssi,
    ssem_forward,
    stroke_accuracy,
    tagconv_forward,
    train_ssi,
    vote_postprocess,
)
from sketchsem.ssi.stem import TagConvLayer


def rand_sketch(rng: np.random.Generator, n_strokes: int,
                canvas: tuple[int, int] = (64, 64), labels=None,
                max_pts: int = 8) -> VectorSketch:
    strokes = []
    for i in range(n_strokes):
        m = int(rng.integers(2, max_pts + 1))
        pts = rng.uniform(0, [canvas[0] - 1, canvas[1] - 1], (m, 2))
        lab = None if labels is None else int(labels[i])
        strokes.append(Stroke(points=pts, parent_id=i, label=lab))
    return VectorSketch(tuple(strokes), canvas)


def tiny_models(seed: int = 0, hidden: int = 4, width: int = 4,
                hops: int = 1) -> tuple[SsemModel, StemModel]:
    ssem = SsemModel(hidden=hidden, layers=1, rng=child_rng(seed, "t", "ssem"))
    stem = StemModel(feature_dim=2 * hidden, width=width, hops=hops,
                     rng=child_rng(seed, "t", "stem"))
    return ssem, stem


class TestAngle:
    def test_quadrants(self):
        assert angle(Point(0, 0), Point(1, 1)) == pytest.approx(np.pi / 4)
        assert angle(Point(0, 0), Point(-1, 0)) == pytest.approx(np.pi)
        assert angle(Point(0, 0), Point(0, -2)) == pytest.approx(-np.pi / 2)
        assert angle(Point(2, 3), Point(5, 3)) == 0.0

    def test_coincident_warns_and_returns_zero(self):
        with pytest.warns(CoincidentCentroids):
            assert angle(Point(1, 1), Point(1, 1)) == 0.0


class TestKnn:
    def test_nearest_on_a_line(self):
        cents = np.array([[0.0, 0], [1, 0], [5, 0]])
        edges = knn_edges(cents, 1)
        assert edges.tolist() == [[0, 1], [1, 0], [2, 1]]

    def test_single_node_and_empty(self):
        assert knn_edges(np.array([[3.0, 3]]), 5).shape == (0, 2)
        assert knn_edges(np.zeros((0, 2)), 5).shape == (0, 2)

    def test_k_capped_at_n_minus_one(self):
        cents = np.array([[0.0, 0], [1, 0], [2, 0]])
        edges = knn_edges(cents, 10)
        assert len(edges) == 6  # every ordered pair

    def test_distance_tie_prefers_smaller_index(self):
        cents = np.array([[0.0, 0], [1, 0], [-1, 0]])
        edges = knn_edges(cents, 1)
        assert [0, 1] in edges.tolist()  # 1 and 2 tie at distance 1


class TestEdgeFeatures:
    def test_values(self):
        cents = np.array([[0.0, 0], [3, 4]])
        feats = edge_features(cents, np.array([[0, 1]]), (10, 10))
        np.testing.assert_allclose(feats[0], [0, 0, 0.5, np.arctan2(4, 3)])

    def test_source_position_normalized_per_axis(self):
        cents = np.array([[5.0, 8], [6, 8]])
        feats = edge_features(cents, np.array([[0, 1], [1, 0]]), (10, 16))
        np.testing.assert_allclose(feats[:, 0], [0.5, 0.6])
        np.testing.assert_allclose(feats[:, 1], [0.5, 0.5])
        np.testing.assert_allclose(feats[1, 3], np.pi)

    def test_empty(self):
        assert edge_features(np.zeros((0, 2)), np.zeros((0, 2), int), (8, 8)).shape == (0, 4)


class TestBuildGraph:
    def test_zeroed_mlp_gives_zero_weights(self):
        ssem, stem = tiny_models()
        for p in stem.edge_mlp.params:
            p.data[:] = 0
        sk = rand_sketch(child_rng(1, "t", "sk"), 4)
        g = build_graph(sk, None, 2, stem.edge_mlp)
        assert g.n == 4 and len(g.edges) == 8
        np.testing.assert_array_equal(g.weights.data, 0)

    def test_weights_nonnegative(self):
        ssem, stem = tiny_models(seed=3)
        sk = rand_sketch(child_rng(2, "t", "sk"), 6)
        g = build_graph(sk, None, 3, stem.edge_mlp)
        assert (g.weights.data >= 0).all()

    def test_empty_sketch_rejected(self):
        _, stem = tiny_models()
        with pytest.raises(EmptyStroke):
            build_graph(VectorSketch((), (64, 64)), None, 3, stem.edge_mlp)


def dense_norm_adj(n: int, edges: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Reference D^(-1/2) W D^(-1/2) built with plain dense ops."""
    big = np.zeros((n, n))
    if len(edges):
        np.add.at(big, (edges[:, 0], edges[:, 1]), w)
    deg = big.sum(axis=1)
    dinv = np.where(deg > 1e-12, 1.0 / np.sqrt(np.where(deg > 1e-12, deg, 1)), 0.0)
    return dinv[:, None] * big * dinv[None, :]


def rand_graph(rng: np.random.Generator, n: int) -> StrokeGraph:
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    take = rng.permutation(len(pairs))[: rng.integers(0, len(pairs) + 1)]
    edges = np.array([pairs[t] for t in take], int).reshape(-1, 2)
    w = rng.uniform(0, 2, len(edges))
    return StrokeGraph(n=n, edges=edges, weights=Value(w), k_nn=3,
                       centroids=np.zeros((n, 2)))


class TestNormalizedAdjacency:
    def test_matches_dense_reference(self):
        for seed in range(8):
            rng = child_rng(seed, "t", "adj")
            n = int(rng.integers(2, 7))
            g = rand_graph(rng, n)
            np.testing.assert_allclose(
                normalized_adjacency(g).data,
                dense_norm_adj(n, g.edges, g.weights.data), atol=1e-12)

    def test_zero_degree_node_contributes_nothing(self):
        # node 2 is isolated: its row and column normalize to zero
        g = StrokeGraph(n=3, edges=np.array([[0, 1], [1, 0]]),
                        weights=Value(np.array([2.0, 8.0])),
                        k_nn=1, centroids=np.zeros((3, 2)))
        adj = normalized_adjacency(g).data
        np.testing.assert_array_equal(adj[2], 0)
        np.testing.assert_array_equal(adj[:, 2], 0)
        assert adj[0, 1] == pytest.approx(2 / np.sqrt(2 * 8))
        assert adj[1, 0] == pytest.approx(8 / np.sqrt(2 * 8))

    def test_edgeless_graph(self):
        g = StrokeGraph(n=4, edges=np.zeros((0, 2), int), weights=Value(np.zeros(0)),
                        k_nn=1, centroids=np.zeros((4, 2)))
        np.testing.assert_array_equal(normalized_adjacency(g).data, np.zeros((4, 4)))


class TestTagConv:
    def tagconv_oracle(self, adj: np.ndarray, x: np.ndarray,
                       layer: TagConvLayer) -> np.ndarray:
        out = x @ layer.thetas[0].data + layer.bias.data
        for h in range(1, layer.hops + 1):
            out = out + np.linalg.matrix_power(adj, h) @ x @ layer.thetas[h].data
        return np.maximum(out, 0)

    def test_matches_matrix_power_oracle(self):
        for seed in range(6):
            rng = child_rng(seed, "t", "tag")
            n = int(rng.integers(2, 7))
            g = rand_graph(rng, n)
            layer = TagConvLayer(3, 5, hops=3, rng=rng, name="t")
            x = rng.normal(size=(n, 3))
            adj = normalized_adjacency(g)
            got = tagconv_forward(adj, Value(x), layer).data
            np.testing.assert_allclose(
                got, self.tagconv_oracle(adj.data, x, layer), atol=1e-10)

    def test_zero_hops_ignores_adjacency(self):
        rng = child_rng(0, "t", "tag0")
        layer = TagConvLayer(3, 4, hops=0, rng=rng, name="t")
        x = rng.normal(size=(5, 3))
        a1 = Value(np.eye(5))
        a2 = Value(rng.uniform(0, 1, (5, 5)))
        y1 = tagconv_forward(a1, Value(x), layer).data
        y2 = tagconv_forward(a2, Value(x), layer).data
        np.testing.assert_array_equal(y1, y2)
        np.testing.assert_allclose(
            y1, np.maximum(x @ layer.thetas[0].data + layer.bias.data, 0))

    def test_edgeless_identity_theta(self):
        # with no edges only the hop-0 term survives; theta0 = I passes
        # nonnegative features straight through
        rng = child_rng(1, "t", "tagid")
        layer = TagConvLayer(4, 4, hops=2, rng=rng, name="t")
        layer.thetas[0].data = np.eye(4)
        layer.bias.data[:] = 0
        x = rng.uniform(0, 1, (3, 4))
        adj = Value(np.zeros((3, 3)))
        np.testing.assert_allclose(tagconv_forward(adj, Value(x), layer).data, x)


class TestSsem:
    def test_feature_dim_and_shape(self):
        model = SsemModel(hidden=5, layers=2, rng=child_rng(0, "t", "s"))
        assert model.feature_dim == 10
        sk = rand_sketch(child_rng(3, "t", "sk"), 3)
        assert model.encode_sketch(sk).shape == (3, 10)

    def test_zero_weights_give_zero_features(self):
        model = SsemModel(hidden=4, layers=2, rng=child_rng(0, "t", "s"))
        for p in model.params:
            p.data[:] = 0
        sk = rand_sketch(child_rng(4, "t", "sk"), 3)
        np.testing.assert_array_equal(model.encode_sketch(sk).data, 0)

    def test_concat_order_forward_then_backward(self):
        model = SsemModel(hidden=4, layers=1, rng=child_rng(0, "t", "s"))
        for p in model.bwd.params:
            p.data[:] = 0
        sk = rand_sketch(child_rng(5, "t", "sk"), 2)
        feats = model.encode_sketch(sk).data
        assert np.abs(feats[:, :4]).max() > 0
        np.testing.assert_array_equal(feats[:, 4:], 0)

    def test_reversal_swaps_halves_with_tied_stacks(self):
        model = SsemModel(hidden=4, layers=1, rng=child_rng(0, "t", "s"))
        for pf, pb in zip(model.fwd.params, model.bwd.params):
            pb.data = pf.data.copy()
        s = Stroke(np.array([[1.0, 2], [5, 9], [8, 3], [2, 2]]))
        f = ssem_forward(s, model, (64, 64)).data
        r = ssem_forward(reverse(s), model, (64, 64)).data
        np.testing.assert_allclose(f[:4], r[4:], atol=1e-12)
        np.testing.assert_allclose(f[4:], r[:4], atol=1e-12)

    def test_batched_matches_single(self):
        model = SsemModel(hidden=6, layers=2, rng=child_rng(0, "t", "s"))
        sk = rand_sketch(child_rng(6, "t", "sk"), 5)
        batch = model.encode_sketch(sk).data
        for i, s in enumerate(sk.strokes):
            single = model.encode_strokes([s], sk.canvas).data[0]
            np.testing.assert_allclose(batch[i], single, atol=1e-10)

    def test_per_stroke_canvas_list(self):
        model = SsemModel(hidden=3, layers=1, rng=child_rng(0, "t", "s"))
        s1 = Stroke(np.array([[10.0, 10], [20, 20]]))
        s2 = Stroke(np.array([[5.0, 5], [10, 10]]))
        # same normalized coordinates under their own canvases
        both = model.encode_strokes([s1, s2], [(100, 100), (50, 50)]).data
        np.testing.assert_allclose(both[0], both[1], atol=1e-12)

    def test_empty_inputs_rejected(self):
        model = SsemModel(hidden=3, layers=1, rng=child_rng(0, "t", "s"))
        with pytest.raises(EmptyStroke):
            model.encode_strokes([], (64, 64))
        with pytest.raises(EmptyStroke):
            ssem_forward(Stroke(np.zeros((0, 2))), model)


class TestBatchedGraphs:
    def test_merge_offsets_edges(self):
        g1 = StrokeGraph(2, np.array([[0, 1]]), Value(np.array([1.0])), 1, np.zeros((2, 2)))
        g2 = StrokeGraph(3, np.array([[0, 2], [2, 1]]), Value(np.array([2.0, 3.0])),
                         1, np.zeros((3, 2)))
        m = merge_graphs([g1, g2])
        assert m.n == 5
        assert m.edges.tolist() == [[0, 1], [2, 4], [4, 3]]
        np.testing.assert_array_equal(m.weights.data, [1, 2, 3])

    def test_block_diagonal_logits_match_per_sketch(self):
        # the training batcher relies on this: merging graphs must not
        # change any sketch's logits
        ssem, stem = tiny_models(seed=7)
        rng = child_rng(8, "t", "sk")
        sks = [rand_sketch(rng, 3), rand_sketch(rng, 4)]
        graphs = [build_graph(sk, None, 2, stem.edge_mlp) for sk in sks]
        feats = [ssem.encode_sketch(sk) for sk in sks]
        separate = np.vstack([stem.logits(g, f).data for g, f in zip(graphs, feats)])
        strokes = [s for sk in sks for s in sk.strokes]
        canvases = [sk.canvas for sk in sks for _ in sk.strokes]
        merged = stem.logits(merge_graphs(graphs),
                             ssem.encode_strokes(strokes, canvases)).data
        np.testing.assert_allclose(merged, separate, atol=1e-10)


class TestClassify:
    def test_empty_sketch(self):
        ssem, stem = tiny_models()
        assert classify(VectorSketch((), (64, 64)), ssem, stem) == []

    def test_labels_and_confidences(self):
        ssem, stem = tiny_models(seed=1)
        sk = rand_sketch(child_rng(9, "t", "sk"), 5)
        preds = classify(sk, ssem, stem, 3)
        assert len(preds) == 5
        for lab, conf in preds:
            assert 0 <= lab < 22
            assert 0 < conf <= 1

    def test_deterministic(self):
        ssem, stem = tiny_models(seed=2)
        sk = rand_sketch(child_rng(10, "t", "sk"), 4)
        assert classify(sk, ssem, stem) == classify(sk, ssem, stem)

    def test_label_sketch_assigns_labels(self):
        ssem, stem = tiny_models(seed=2)
        sk = rand_sketch(child_rng(11, "t", "sk"), 4)
        out, confs = label_sketch(sk, ssem, stem, vote=False)
        assert len(confs) == 4
        assert all(s.label is not None for s in out.strokes)
        assert out.canvas == sk.canvas


class TestVote:
    def test_point_weighted_majority(self):
        out = vote_postprocess([1, 1, 2], [0, 0, 0], [10, 10, 30])
        np.testing.assert_array_equal(out, [2, 2, 2])

    def test_tie_takes_smaller_id(self):
        out = vote_postprocess([5, 3], [0, 0], [10, 10])
        np.testing.assert_array_equal(out, [3, 3])

    def test_parents_independent(self):
        out = vote_postprocess([1, 2, 2, 7], [0, 0, 0, 1], [1, 1, 1, 50])
        np.testing.assert_array_equal(out, [2, 2, 2, 7])

    def test_misaligned_rejected(self):
        with pytest.raises(ValueError):
            vote_postprocess([1, 2], [0], [1, 1])

    @given(st.lists(st.tuples(st.integers(0, 21), st.integers(0, 3),
                              st.integers(1, 9)), min_size=1, max_size=20))
    def test_idempotent(self, rows):
        labels = [r[0] for r in rows]
        parents = [r[1] for r in rows]
        counts = [r[2] for r in rows]
        once = vote_postprocess(labels, parents, counts)
        twice = vote_postprocess(once, parents, counts)
        np.testing.assert_array_equal(once, twice)


class TestPipelineGradient:
    def test_full_model_finite_differences(self):
        ssem, stem = tiny_models(seed=5, hidden=3, width=4, hops=1)
        sk = rand_sketch(child_rng(12, "t", "sk"), 4, max_pts=5)
        targets = np.array([1, 4, 9, 16])

        # positive biases keep every relu awake and clear of its kink, so
        # central differences see a smooth function (a tiny random net
        # otherwise dies: all-zero activations, flat loss, zero grads)
        stem.edge_mlp.layers[-1].b.data[:] = 2.0
        stem.tag1.bias.data[:] = 0.5
        stem.tag2.bias.data[:] = 0.5
        stem.head.layers[0].b.data[:] = 0.5
        g = build_graph(sk, None, 2, stem.edge_mlp)
        assert (g.weights.data > 0.1).all()

        def loss():
            feats = ssem.encode_sketch(sk)
            graph = build_graph(sk, feats, 2, stem.edge_mlp)
            return softmax_cross_entropy(stem.logits(graph, feats), targets)

        err = grad_check(loss, ssem.params + stem.params)
        assert err < 1e-4


class TestTrain:
    def small_dataset(self, seed: int = 0) -> list[VectorSketch]:
        rng = child_rng(seed, "t", "data")
        return [rand_sketch(rng, 4, labels=[0, 4, 10, 16]),
                rand_sketch(rng, 3, labels=[4, 10, 0])]

    def small_config(self, **kw) -> SsiConfig:
        base = dict(lr=0.05, epochs=10, batch_size=1, k_nn=2, hidden=8,
                    layers=1, width=8, hops=1, seed=0, augment=False)
        base.update(kw)
        return SsiConfig(**base)

    def test_loss_strictly_decreases_on_one_sketch(self):
        # single sketch, one step per epoch: the first 10 steps each lower
        # the loss at the default learning rate
        one = [rand_sketch(child_rng(0, "t", "one"), 5, labels=[0, 4, 10, 16, 9])]
        _, _, log = train_ssi(one, self.small_config(lr=0.001))
        losses = [e["loss"] for e in log]
        assert all(b < a for a, b in zip(losses, losses[1:]))

    def test_memorizes_small_dataset(self):
        data = self.small_dataset()
        ssem, stem, log = train_ssi(data, self.small_config(epochs=60))
        assert len(log) == 60
        assert log[-1]["loss"] < 0.05 * log[0]["loss"]
        assert log[-1]["train_acc"] == 1.0

    def test_same_seed_same_curve(self):
        data = self.small_dataset()
        cfg = self.small_config(epochs=4)
        _, _, log_a = train_ssi(data, cfg)
        _, _, log_b = train_ssi(data, cfg)
        assert log_a == log_b

    def test_different_seed_differs(self):
        data = self.small_dataset()
        _, _, log_a = train_ssi(data, self.small_config(epochs=2))
        _, _, log_b = train_ssi(data, self.small_config(epochs=2, seed=1))
        assert log_a != log_b

    def test_early_stop_on_validation_accuracy(self):
        data = self.small_dataset()
        cfg = self.small_config(epochs=40, stop_accuracy=1.0)
        _, _, log = train_ssi(data, cfg, eval_dataset=data)
        assert len(log) < 40
        assert log[-1]["val_acc"] >= 1.0

    def test_rejects_bad_datasets(self):
        with pytest.raises(ValueError):
            train_ssi([], self.small_config())
        unlabeled = [rand_sketch(child_rng(0, "t", "u"), 2)]
        with pytest.raises(ValueError):
            train_ssi(unlabeled, self.small_config())
        with pytest.raises(ValueError):
            train_ssi([VectorSketch((), (64, 64))], self.small_config())

    def test_augmented_items_adds_simplified_variants(self):
        data = self.small_dataset()
        items = augmented_items(data)
        assert len(items) == 3 * len(data)
        for i, sk in enumerate(data):
            assert items[3 * i] is sk
            assert len(items[3 * i + 1]) <= len(sk)

    def test_stroke_accuracy_against_own_predictions(self):
        ssem, stem = tiny_models(seed=4)
        sk = rand_sketch(child_rng(13, "t", "sk"), 5)
        preds = [p[0] for p in classify(sk, ssem, stem, 2)]
        right = VectorSketch(tuple(
            Stroke(s.points, s.parent_id, lab) for s, lab in zip(sk.strokes, preds)),
            sk.canvas)
        wrong = VectorSketch(tuple(
            Stroke(s.points, s.parent_id, (lab + 1) % 22)
            for s, lab in zip(sk.strokes, preds)), sk.canvas)
        assert stroke_accuracy([right], ssem, stem, 2) == 1.0
        assert stroke_accuracy([wrong], ssem, stem, 2) == 0.0


class TestSsiCheckpoint:
    def test_round_trip_predictions(self, tmp_path):
        ssem, stem = tiny_models(seed=6)
        sk = rand_sketch(child_rng(14, "t", "sk"), 4)
        before = classify(sk, ssem, stem, 2)
        path = tmp_path / "ssi.ckpt"
        save_ssi(path, ssem, stem, k_nn=2)
        ssem2, stem2, meta = load_ssi(path)
        assert meta["k_nn"] == 2 and meta["hidden"] == 4
        assert classify(sk, ssem2, stem2, 2) == before

    def test_wrong_kind_rejected(self, tmp_path):
        path = tmp_path / "other.ckpt"
        save_checkpoint(path, {"x": np.zeros(3)}, {"kind": "other"})
        with pytest.raises(CheckpointError):
            load_ssi(path)
