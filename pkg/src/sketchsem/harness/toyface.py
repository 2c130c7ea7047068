"""Procedural toy faces: seeded specs rendered to segmaps and shaded images.

A ToyFaceSpec holds every parameter of one face in canvas fractions, so the
same spec renders consistently at any resolution.  The segmentation map uses
the 19 source labels; the shaded image applies per-region tones, a lighting
ramp and hair streaks so edge extraction has texture to find.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..categories import (
    SRC_CLOTH,
    SRC_EAR_R,
    SRC_EYE_G,
    SRC_HAIR,
    SRC_HAT,
    SRC_L_BROW,
    SRC_L_EAR,
    SRC_L_EYE,
    SRC_L_LIP,
    SRC_MOUTH,
    SRC_NECK,
    SRC_NECK_L,
    SRC_NOSE,
    SRC_R_BROW,
    SRC_R_EAR,
    SRC_R_EYE,
    SRC_SKIN,
    SRC_U_LIP,
)
from ..pipeline import SegMap

DEFAULT_ACCESSORY_RATES: dict[str, float] = {
    "hat": 0.05, "glasses": 0.06, "earring": 0.25, "necklace": 0.07,
}


@dataclass(frozen=True)
class ToyFaceSpec:
    """Seeded face parameters, all geometry in canvas fractions."""

    pose_dx: float
    pose_dy: float
    rx: float
    ry: float
    eye_dx: float
    eye_r: float
    brow_h: float
    nose_w: float
    nose_len: float
    mouth_w: float
    mouth_h: float
    hair_drop: float
    neck_len: float
    skin_tone: float
    hair_tone: float
    cloth_tone: float
    bg_tone: float
    hat_tone: float
    streak_stride: int
    streak_phase: int
    hat: bool
    glasses: bool
    earring: bool
    necklace: bool

    @property
    def center(self) -> tuple[float, float]:
        return 0.5 + self.pose_dx, 0.44 + self.pose_dy

    @property
    def accessories(self) -> tuple[bool, bool, bool, bool]:
        return (self.hat, self.glasses, self.earring, self.necklace)


def sample_face_spec(rng: np.random.Generator,
                     accessory_rates: dict[str, float] | None = None) -> ToyFaceSpec:
    """Draw one spec; the draw order is fixed so streams stay aligned."""
    rates = dict(DEFAULT_ACCESSORY_RATES)
    if accessory_rates:
        rates.update(accessory_rates)

    def u(a: float, b: float) -> float:
        return float(rng.uniform(a, b))

    spec = dict(
        pose_dx=u(-0.035, 0.035), pose_dy=u(-0.03, 0.03),
        rx=u(0.21, 0.26), ry=u(0.27, 0.33),
        eye_dx=u(0.085, 0.115), eye_r=u(0.026, 0.036),
        brow_h=u(0.010, 0.016),
        nose_w=u(0.020, 0.032), nose_len=u(0.065, 0.095),
        mouth_w=u(0.055, 0.080), mouth_h=u(0.016, 0.028),
        hair_drop=u(0.30, 0.45), neck_len=u(0.05, 0.085),
        skin_tone=u(0.80, 1.05), hair_tone=u(0.55, 1.10),
        cloth_tone=u(0.70, 1.10), bg_tone=u(0.85, 1.05),
        hat_tone=u(0.70, 1.10),
        streak_stride=int(rng.integers(4, 7)),
        streak_phase=int(rng.integers(0, 6)),
    )
    # flags drawn last, one draw each, whether or not the rate is zero
    for name in ("hat", "glasses", "earring", "necklace"):
        spec[name] = bool(rng.random() < rates[name])
    return ToyFaceSpec(**spec)


def _grids(resolution: int) -> tuple[np.ndarray, np.ndarray]:
    f = (np.arange(resolution) + 0.5) / resolution
    return np.meshgrid(f, f, indexing="ij")


def _ellipse(yy, xx, cx: float, cy: float, rx: float, ry: float) -> np.ndarray:
    return ((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2 <= 1.0


def render_segmap(spec: ToyFaceSpec, resolution: int = 96) -> SegMap:
    """Paint the face regions back-to-front into a source-label grid."""
    yy, xx = _grids(resolution)
    cx, cy = spec.center
    g = np.zeros((resolution, resolution), np.int16)

    cloth_top = cy + spec.ry + spec.neck_len
    g[yy >= cloth_top] = SRC_CLOTH
    neck_w = spec.rx * 0.42
    neck = (np.abs(xx - cx) <= neck_w) & (yy >= cy) & (yy < cloth_top)
    g[neck] = SRC_NECK
    if spec.necklace:
        band = neck & (yy >= cloth_top - 0.024)
        g[band] = SRC_NECK_L

    ear_y = cy + 0.015
    g[_ellipse(yy, xx, cx - spec.rx - 0.012, ear_y, 0.034, 0.052)] = SRC_L_EAR
    g[_ellipse(yy, xx, cx + spec.rx + 0.012, ear_y, 0.034, 0.052)] = SRC_R_EAR

    g[_ellipse(yy, xx, cx, cy, spec.rx, spec.ry)] = SRC_SKIN

    hair_y = cy - spec.ry * (1.0 - spec.hair_drop)
    outer = _ellipse(yy, xx, cx, cy, spec.rx * 1.07, spec.ry * 1.07)
    inner = _ellipse(yy, xx, cx, cy, spec.rx * 0.94, spec.ry * 0.94)
    g[outer & (yy <= hair_y)] = SRC_HAIR
    g[outer & ~inner & (yy <= cy + 0.18 * spec.ry)] = SRC_HAIR

    if spec.hat:
        hat_y = hair_y - 0.04
        crown = _ellipse(yy, xx, cx, cy, spec.rx * 1.12, spec.ry * 1.12)
        g[crown & (yy <= hat_y)] = SRC_HAT
        brim = (np.abs(xx - cx) <= spec.rx * 1.3) & (np.abs(yy - hat_y) <= 0.016)
        g[brim] = SRC_HAT

    if spec.earring:
        g[_ellipse(yy, xx, cx - spec.rx - 0.018, ear_y + 0.055, 0.016, 0.016)] = SRC_EAR_R

    brow_y = cy - 0.105
    for sign, lab in ((-1, SRC_L_BROW), (1, SRC_R_BROW)):
        ex = cx + sign * spec.eye_dx
        rect = (np.abs(xx - ex) <= 0.045) & (np.abs(yy - brow_y) <= spec.brow_h)
        g[rect] = lab

    eye_y = cy - 0.048
    if spec.glasses:
        for sign in (-1, 1):
            ex = cx + sign * spec.eye_dx
            ring = (_ellipse(yy, xx, ex, eye_y, 0.058, 0.047)
                    & ~_ellipse(yy, xx, ex, eye_y, 0.037, 0.027))
            g[ring] = SRC_EYE_G
        bridge = (np.abs(xx - cx) <= spec.eye_dx - 0.030) & (np.abs(yy - eye_y) <= 0.007)
        g[bridge] = SRC_EYE_G
        temples = ((np.abs(yy - eye_y) <= 0.006)
                   & (np.abs(xx - cx) >= spec.eye_dx + 0.055)
                   & (np.abs(xx - cx) <= spec.rx + 0.01))
        g[temples] = SRC_EYE_G
    for sign, lab in ((-1, SRC_L_EYE), (1, SRC_R_EYE)):
        ex = cx + sign * spec.eye_dx
        g[_ellipse(yy, xx, ex, eye_y, spec.eye_r, spec.eye_r * 0.7)] = lab

    nose_top = cy - 0.01
    frac = np.clip((yy - nose_top) / spec.nose_len, 0.0, None)
    wedge = (yy >= nose_top) & (yy <= nose_top + spec.nose_len) \
        & (np.abs(xx - cx) <= spec.nose_w * frac)
    g[wedge] = SRC_NOSE

    my = cy + 0.135
    mouth = _ellipse(yy, xx, cx, my, spec.mouth_w, spec.mouth_h)
    g[mouth & (yy <= my)] = SRC_U_LIP
    g[mouth & (yy > my)] = SRC_L_LIP
    g[mouth & (np.abs(yy - my) <= 0.005)] = SRC_MOUTH
    return SegMap(g)


# Base RGB per source label; tone fields scale groups of rows.
_BASE_COLORS = np.array([
    (0.82, 0.87, 0.93),  # background
    (0.98, 0.80, 0.66),  # skin
    (0.94, 0.73, 0.58),  # nose
    (0.18, 0.18, 0.20),  # eye_g
    (0.95, 0.95, 0.97),  # l_eye
    (0.95, 0.95, 0.97),  # r_eye
    (0.38, 0.26, 0.18),  # l_brow
    (0.38, 0.26, 0.18),  # r_brow
    (0.96, 0.76, 0.62),  # l_ear
    (0.96, 0.76, 0.62),  # r_ear
    (0.62, 0.20, 0.22),  # mouth
    (0.80, 0.30, 0.32),  # u_lip
    (0.88, 0.42, 0.40),  # l_lip
    (0.35, 0.24, 0.16),  # hair
    (0.30, 0.50, 0.80),  # hat
    (0.95, 0.85, 0.25),  # ear_r
    (0.92, 0.92, 0.96),  # neck_l
    (0.93, 0.74, 0.60),  # neck
    (0.30, 0.35, 0.55),  # cloth
])


def _spec_palette(spec: ToyFaceSpec) -> np.ndarray:
    colors = _BASE_COLORS.copy()
    colors[0] *= spec.bg_tone
    for row in (SRC_SKIN, SRC_NOSE, SRC_L_EAR, SRC_R_EAR, SRC_NECK):
        colors[row] *= spec.skin_tone
    for row in (SRC_HAIR, SRC_L_BROW, SRC_R_BROW):
        colors[row] *= spec.hair_tone
    colors[SRC_CLOTH] *= spec.cloth_tone
    colors[SRC_HAT] *= spec.hat_tone
    return colors


def render_image(spec: ToyFaceSpec, resolution: int = 96) -> np.ndarray:
    """Shaded (3, R, R) image in [0, 1], quantized to 1/255 steps.

    Quantizing at render time makes uint8 persistence lossless.
    """
    seg = render_segmap(spec, resolution)
    yy, xx = _grids(resolution)
    img = _spec_palette(spec)[seg.grid]
    img *= (0.92 + 0.10 * xx - 0.06 * yy)[..., None]

    cols = np.arange(resolution)[None, :].repeat(resolution, axis=0)
    streak = (cols + spec.streak_phase) % spec.streak_stride == 0
    hairy = (seg.grid == SRC_HAIR) & streak
    img[hairy] *= 0.72

    img = np.round(np.clip(img, 0.0, 1.0) * 255.0) / 255.0
    return img.transpose(2, 0, 1)
