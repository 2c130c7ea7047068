"""Raster pipeline against independent reference implementations.

The thinning oracle below is a direct per-pixel transcription of the classic
two-subiteration rule set (B(p) in 2..6, A(p)=1, and the subpass-specific
products of N/E/S/W neighbors), with simultaneous deletion per subpass.  The
production code is vectorized; this file checks it pixel-for-pixel against
the naive loops, then checks the vectorize/rasterize round-trip.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from sketchsem.categories import (
    SRC_BACKGROUND,
    SRC_CLOTH,
    SRC_HAIR,
    SRC_HAT,
    SRC_L_LIP,
    SRC_NECK,
    SRC_NOSE,
    SRC_SKIN,
    SRC_U_LIP,
)
from sketchsem.pipeline import (
    SegMap,
    _zhang_suen,
    extract_contour,
    extract_edges,
    merge_maps,
    remap_labels,
    simplify,
    thin,
    vectorize,
)
from sketchsem.sketch import SemanticRaster, rasterize

# Category ids used in assertions.
CAT_SKIN, CAT_NOSE, CAT_MOUTH, CAT_HAIR = 0, 1, 9, 10
CAT_SKIN_HAIR, CAT_SKIN_NECK, CAT_SKIN_CLOTHES, CAT_SKIN_HAT = 16, 17, 18, 19
CAT_HAT_HAIR = 21


# ---------------------------------------------------------------------------
# Reference thinning oracle (naive loops, written before the production code
# was trusted).

def zhang_suen_oracle(mask: np.ndarray) -> np.ndarray:
    m = mask.astype(bool).copy()
    h, w = m.shape

    def ring(y, x):
        out = []
        for dy, dx in ((-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1)):
            ny, nx = y + dy, x + dx
            out.append(bool(m[ny, nx]) if 0 <= ny < h and 0 <= nx < w else False)
        return out

    while True:
        changed = False
        for sub in (0, 1):
            kill = []
            for y in range(h):
                for x in range(w):
                    if not m[y, x]:
                        continue
                    p = ring(y, x)
                    b = sum(p)
                    if not 2 <= b <= 6:
                        continue
                    a = sum(1 for i in range(8) if not p[i] and p[(i + 1) % 8])
                    if a != 1:
                        continue
                    n, e, s, wv = p[0], p[2], p[4], p[6]
                    if sub == 0:
                        if (n and e and s) or (e and s and wv):
                            continue
                    else:
                        if (n and e and wv) or (n and s and wv):
                            continue
                    kill.append((y, x))
            for y, x in kill:
                m[y, x] = False
            changed = changed or bool(kill)
        if not changed:
            return m


def random_blob(rng, h=24, w=24, p=0.55, smooth=1):
    m = rng.random((h, w)) < p
    for _ in range(smooth):
        s = np.zeros((h, w), int)
        mm = np.pad(m, 1)
        for dy in (0, 1, 2):
            for dx in (0, 1, 2):
                s += mm[dy:dy + h, dx:dx + w]
        m = s >= 5
    return m


def has_2x2_block(mask):
    return bool((mask[:-1, :-1] & mask[1:, :-1] & mask[:-1, 1:] & mask[1:, 1:]).any())


class TestThin:
    def test_rectangle_5x3_thins_to_center_row(self):
        # The two-subiteration rule set erodes line ends, so a 5x3 slab
        # collapses to a short remnant of the center row, not the full
        # 5-px line; the oracle decides the exact pixels.
        m = np.zeros((5, 7), bool)
        m[1:4, 1:6] = True  # 5 wide, 3 tall
        expected = zhang_suen_oracle(m)
        assert expected.any() and not has_2x2_block(expected)
        ys, xs = np.nonzero(expected)
        assert set(ys) == {2}  # survivors sit on the center row
        out = thin(SemanticRaster(m, np.where(m, 0, -1).astype(np.int16)))
        assert np.array_equal(out.mask, expected)

    @pytest.mark.parametrize("seed", range(12))
    def test_matches_oracle_on_random_blobs(self, seed):
        m = random_blob(np.random.default_rng(seed))
        assert np.array_equal(_zhang_suen(m), zhang_suen_oracle(m))

    def test_one_px_line_unchanged(self):
        m = np.zeros((5, 9), bool)
        m[2, 1:8] = True
        r = SemanticRaster(m, np.where(m, 3, -1).astype(np.int16))
        out = thin(r)
        assert np.array_equal(out.mask, m)
        assert np.array_equal(out.labels, r.labels)

    def test_idempotent(self):
        rng = np.random.default_rng(42)
        for _ in range(6):
            m = random_blob(rng)
            r = thin(SemanticRaster(m, np.where(m, 5, -1).astype(np.int16)))
            again = thin(r)
            assert np.array_equal(again.mask, r.mask)
            assert np.array_equal(again.labels, r.labels)

    def test_labels_survive_at_kept_pixels(self):
        rng = np.random.default_rng(7)
        m = random_blob(rng)
        labels = np.where(m, (np.arange(m.size).reshape(m.shape) % 22), -1).astype(np.int16)
        out = thin(SemanticRaster(m, labels))
        kept = out.mask
        assert np.array_equal(out.labels[kept], labels[kept])
        assert (out.labels[~kept] == -1).all()

    @settings(max_examples=60, deadline=None)
    @given(hnp.arrays(bool, st.tuples(st.integers(1, 12), st.integers(1, 12))))
    def test_never_leaves_2x2_block(self, m):
        out = thin(SemanticRaster(m, np.where(m, 0, -1).astype(np.int16)))
        assert not has_2x2_block(out.mask)
        assert (out.mask <= m).all()  # thinning only removes pixels


class TestExtractContour:
    def test_uniform_map_has_no_contour(self):
        seg = SegMap(np.full((6, 6), SRC_SKIN, np.int16))
        assert not extract_contour(seg).mask.any()

    def test_skin_hair_boundary_is_pair_label(self):
        g = np.full((6, 6), SRC_SKIN, np.int16)
        g[:3] = SRC_HAIR
        r = extract_contour(SegMap(g))
        assert r.mask[2].all() and r.mask[3].all()
        assert (r.labels[2] == CAT_SKIN_HAIR).all()
        assert (r.labels[3] == CAT_SKIN_HAIR).all()
        assert not r.mask[0].any() and not r.mask[5].any()

    def test_skin_defers_to_facial_part(self):
        g = np.full((6, 6), SRC_SKIN, np.int16)
        g[2:4, 2:4] = SRC_NOSE
        r = extract_contour(SegMap(g))
        assert (r.labels[r.mask] == CAT_NOSE).all()

    def test_background_side_dropped(self):
        g = np.full((6, 6), SRC_BACKGROUND, np.int16)
        g[:, 3:] = SRC_HAIR
        r = extract_contour(SegMap(g))
        assert (r.labels[:, 3] == CAT_HAIR).all()
        assert not r.mask[:, 2].any()

    def test_lip_seam_becomes_mouth(self):
        g = np.full((6, 6), SRC_U_LIP, np.int16)
        g[3:] = SRC_L_LIP
        r = extract_contour(SegMap(g))
        assert (r.labels[r.mask] == CAT_MOUTH).all()

    def test_hat_hair_pair(self):
        g = np.full((4, 6), SRC_HAT, np.int16)
        g[2:] = SRC_HAIR
        r = extract_contour(SegMap(g))
        assert (r.labels[r.mask] == CAT_HAT_HAIR).all()

    def test_pair_preferred_over_plain_neighbor(self):
        # Skin pixel with hair to the north and nose to the east: the
        # boundary pair wins even though nose comes first alphabetically.
        g = np.full((3, 3), SRC_SKIN, np.int16)
        g[0, :] = SRC_HAIR
        g[1, 2] = SRC_NOSE
        r = extract_contour(SegMap(g))
        assert r.labels[1, 1] == CAT_SKIN_HAIR


class TestRemapLabels:
    def test_remap_table(self):
        grid = np.arange(19).reshape(1, 19)
        out = remap_labels(grid)
        assert out[0, SRC_BACKGROUND] == -1
        assert out[0, SRC_U_LIP] == CAT_MOUTH and out[0, SRC_L_LIP] == CAT_MOUTH
        assert out[0, SRC_SKIN] == CAT_SKIN
        assert out.max() == 15


class TestMergeMaps:
    def _contour(self):
        m = np.zeros((8, 8), bool)
        m[4, 1:7] = True
        labels = np.where(m, CAT_SKIN_HAIR, -1).astype(np.int16)
        return SemanticRaster(m, labels)

    def test_empty_edges_is_thin_contour(self):
        c = self._contour()
        out = merge_maps(c, SemanticRaster.empty(8, 8))
        expect = thin(c)
        assert np.array_equal(out.mask, expect.mask)
        assert np.array_equal(out.labels, expect.labels)

    def test_empty_contour_is_thin_edges(self):
        e = np.zeros((8, 8), bool)
        e[2, 1:7] = True
        edges = SemanticRaster(e, np.full(e.shape, -1, np.int16))
        out = merge_maps(SemanticRaster.empty(8, 8), edges)
        assert np.array_equal(out.mask, thin(edges).mask)

    def test_edge_near_contour_inherits_label(self):
        c = self._contour()
        e = np.zeros((8, 8), bool)
        e[5, 1:7] = True  # distance 1 from the contour line
        out = merge_maps(c, SemanticRaster(e, np.full(e.shape, -1, np.int16)), radius=1)
        kept = out.mask
        assert kept.any()
        assert set(np.unique(out.labels[kept])) == {CAT_SKIN_HAIR}

    def test_far_edge_keeps_own_channel(self):
        c = self._contour()
        e = np.zeros((8, 8), bool)
        e[0, 1:7] = True  # distance 4, beyond radius
        out = merge_maps(c, SemanticRaster(e, np.full(e.shape, -1, np.int16)), radius=1)
        assert (out.labels[0][out.mask[0]] == -1).all()

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            merge_maps(self._contour(), SemanticRaster.empty(9, 8))

    def test_default_radius_scales(self):
        # At width 512 the radius is 2: an edge 2 px away is relabeled.
        m = np.zeros((8, 512), bool)
        m[4, :] = True
        c = SemanticRaster(m, np.where(m, CAT_HAIR, -1).astype(np.int16))
        e = np.zeros((8, 512), bool)
        e[6, :] = True
        out = merge_maps(c, SemanticRaster(e, np.full(e.shape, -1, np.int16)))
        labs = np.unique(out.labels[out.mask])
        assert set(labs) == {CAT_HAIR}


class TestVectorize:
    def test_five_pixel_hair_line(self):
        m = np.zeros((3, 7), bool)
        m[1, 1:6] = True
        r = SemanticRaster(m, np.where(m, CAT_HAIR, -1).astype(np.int16))
        sk = vectorize(r)
        assert len(sk) == 1
        s = sk.strokes[0]
        assert s.label == CAT_HAIR and len(s) == 5
        assert np.array_equal(s.points[:, 1], np.ones(5))

    def test_partition_property(self):
        rng = np.random.default_rng(3)
        m = random_blob(rng)
        labels = np.where(m, (np.add.outer(np.arange(24) // 6, np.arange(24) // 6) % 22), -1)
        r = thin(SemanticRaster(m, labels.astype(np.int16)))
        sk = vectorize(r)
        seen = set()
        for s in sk.strokes:
            for x, y in s.points:
                assert (x, y) not in seen
                seen.add((x, y))
        assert len(seen) == int(r.mask.sum())

    @pytest.mark.parametrize("seed", range(8))
    def test_round_trip_exact(self, seed):
        rng = np.random.default_rng(seed)
        m = random_blob(rng)
        labels = np.where(m, (np.arange(m.size).reshape(m.shape) // 5) % 22, -1)
        if seed % 2:
            labels[m & (labels % 3 == 0)] = -1  # mix in unlabeled pixels
        r = thin(SemanticRaster(m, labels.astype(np.int16)))
        sk = vectorize(r)
        back = rasterize(sk, size=(r.width, r.height))
        assert np.array_equal(back.mask, r.mask)
        assert np.array_equal(back.labels, r.labels)

    def test_consecutive_points_adjacent(self):
        rng = np.random.default_rng(11)
        m = random_blob(rng)
        r = thin(SemanticRaster(m, np.where(m, 1, -1).astype(np.int16)))
        for s in vectorize(r).strokes:
            d = np.abs(np.diff(s.points, axis=0))
            assert (d.max(axis=1) <= 1).all()

    def test_respects_split_cap(self):
        m = np.zeros((2, 130), bool)
        m[0] = True
        r = SemanticRaster(m, np.where(m, 2, -1).astype(np.int16))
        sk = vectorize(r, max_points=50)
        assert [len(s) for s in sk.strokes] == [50, 50, 30]
        assert len({s.parent_id for s in sk.strokes}) == 1


class TestSimplify:
    def _sketch(self):
        import sketchsem as ss
        mk = lambda n, pid, lab: ss.Stroke(
            np.stack([np.arange(n, dtype=float), np.full(n, float(pid))], 1),
            parent_id=pid, label=lab)
        strokes = (
            mk(10, 0, CAT_HAIR), mk(10, 0, CAT_HAIR),   # parent 0: 20 points
            mk(15, 1, CAT_HAIR),                        # parent 1: 15 points
            mk(5, 2, CAT_HAIR),                         # parent 2: 5 points
            mk(9, 3, CAT_SKIN),                         # parent 3: lone skin
        )
        return ss.VectorSketch(strokes, canvas=(64, 64))

    def test_top_k_by_parent_length(self):
        out = simplify(self._sketch(), 2)
        kept = {(s.label, s.parent_id) for s in out.strokes}
        assert kept == {(CAT_HAIR, 0), (CAT_HAIR, 1), (CAT_SKIN, 3)}
        assert len(out) == 4  # both segments of parent 0 survive

    def test_zero_keeps_nothing(self):
        assert len(simplify(self._sketch(), 0)) == 0

    def test_monotone(self):
        sk = self._sketch()
        small = {(s.label, s.parent_id, len(s)) for s in simplify(sk, 1).strokes}
        big = {(s.label, s.parent_id, len(s)) for s in simplify(sk, 3).strokes}
        assert small <= big

    def test_tie_breaks_to_smaller_parent(self):
        import sketchsem as ss
        mk = lambda pid: ss.Stroke(np.zeros((4, 2)), parent_id=pid, label=CAT_HAIR)
        sk = ss.VectorSketch((mk(5), mk(2)), canvas=(8, 8))
        out = simplify(sk, 1)
        assert [s.parent_id for s in out.strokes] == [2]


class TestExtractEdges:
    def test_step_image_edge(self):
        img = np.zeros((16, 16))
        img[:, 8:] = 1.0
        r = extract_edges(img)
        ys, xs = np.nonzero(r.mask)
        assert len(xs) > 0
        assert set(xs) <= {6, 7, 8, 9}

    def test_flat_image_no_edges(self):
        assert not extract_edges(np.full((8, 8), 0.4)).mask.any()

    def test_hysteresis_drops_isolated_weak(self):
        img = np.zeros((24, 24))
        img[:, 12:] = 1.0      # strong step
        img[4, 2] = 0.18       # small isolated bump, weak-only response
        r = extract_edges(img, low=0.05, high=0.5)
        assert r.mask[:, 10:14].any()
        assert not r.mask[:8, :8].any()

    def test_rgb_input(self):
        img = np.zeros((3, 12, 12))
        img[:, 6:, :] = 1.0
        assert extract_edges(img).mask.any()

    def test_labels_empty(self):
        img = np.zeros((8, 8))
        img[4:] = 1.0
        r = extract_edges(img)
        assert (r.labels == -1).all()
