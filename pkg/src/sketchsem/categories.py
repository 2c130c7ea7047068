"""Face-part category scheme.

Source segmentation maps use a 19-label convention (id = pixel value):
background plus 18 face parts.  Stroke categories use a 22-entry scheme:
the background label is dropped, the two lip labels fold into ``mouth``,
and six boundary categories are added for the region pairs whose shared
contour is drawn as a single line (skin-hair, skin-neck, skin-clothes,
skin-hat, skin-earring, hat-hair).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import UnknownCategory

# Source-label ids (pixel values in input segmentation maps).
SRC_BACKGROUND = 0
SRC_SKIN = 1
SRC_NOSE = 2
SRC_EYE_G = 3
SRC_L_EYE = 4
SRC_R_EYE = 5
SRC_L_BROW = 6
SRC_R_BROW = 7
SRC_L_EAR = 8
SRC_R_EAR = 9
SRC_MOUTH = 10
SRC_U_LIP = 11
SRC_L_LIP = 12
SRC_HAIR = 13
SRC_HAT = 14
SRC_EAR_R = 15
SRC_NECK_L = 16
SRC_NECK = 17
SRC_CLOTH = 18

SOURCE_NAMES = (
    "background", "skin", "nose", "eye_g", "l_eye", "r_eye", "l_brow",
    "r_brow", "l_ear", "r_ear", "mouth", "u_lip", "l_lip", "hair", "hat",
    "ear_r", "neck_l", "neck", "cloth",
)

N_SOURCE_LABELS = len(SOURCE_NAMES)
N_CATEGORIES = 22


@dataclass(frozen=True)
class Category:
    id: int
    name: str
    color: str  # display colour, "#rrggbb"


# The 22 stroke categories.  Ids 0..15 are remapped face parts, 16..21 the
# boundary categories.
CATEGORIES: tuple[Category, ...] = (
    Category(0, "skin", "#cc9966"),
    Category(1, "nose", "#e6b800"),
    Category(2, "eye_g", "#663399"),
    Category(3, "l_eye", "#3366ff"),
    Category(4, "r_eye", "#33ccff"),
    Category(5, "l_brow", "#804000"),
    Category(6, "r_brow", "#b35900"),
    Category(7, "l_ear", "#ff8080"),
    Category(8, "r_ear", "#cc6699"),
    Category(9, "mouth", "#ff3333"),
    Category(10, "hair", "#4d4d4d"),
    Category(11, "hat", "#009933"),
    Category(12, "ear_r", "#ffcc00"),
    Category(13, "neck_l", "#ff66ff"),
    Category(14, "neck", "#d2a679"),
    Category(15, "cloth", "#3333cc"),
    Category(16, "skin-hair", "#99cc00"),
    Category(17, "skin-neck", "#00cccc"),
    Category(18, "skin-clothes", "#9966ff"),
    Category(19, "skin-hat", "#66ff66"),
    Category(20, "skin-earring", "#ff9933"),
    Category(21, "hat-hair", "#006666"),
)

# Source label -> category id; background maps to nothing, lips fold
# into mouth.
SOURCE_TO_CATEGORY: dict[int, int | None] = {
    SRC_BACKGROUND: None,
    SRC_SKIN: 0,
    SRC_NOSE: 1,
    SRC_EYE_G: 2,
    SRC_L_EYE: 3,
    SRC_R_EYE: 4,
    SRC_L_BROW: 5,
    SRC_R_BROW: 6,
    SRC_L_EAR: 7,
    SRC_R_EAR: 8,
    SRC_MOUTH: 9,
    SRC_U_LIP: 9,
    SRC_L_LIP: 9,
    SRC_HAIR: 10,
    SRC_HAT: 11,
    SRC_EAR_R: 12,
    SRC_NECK_L: 13,
    SRC_NECK: 14,
    SRC_CLOTH: 15,
}

# Region pairs whose shared boundary gets its own category.
BOUNDARY_PAIRS: dict[frozenset[int], int] = {
    frozenset((SRC_SKIN, SRC_HAIR)): 16,
    frozenset((SRC_SKIN, SRC_NECK)): 17,
    frozenset((SRC_SKIN, SRC_CLOTH)): 18,
    frozenset((SRC_SKIN, SRC_HAT)): 19,
    frozenset((SRC_SKIN, SRC_EAR_R)): 20,
    frozenset((SRC_HAT, SRC_HAIR)): 21,
}


@dataclass(frozen=True)
class CategoryScheme:
    """Category table plus the source-label remap and boundary pairs."""

    categories: tuple[Category, ...] = CATEGORIES
    source_names: tuple[str, ...] = SOURCE_NAMES

    def __len__(self) -> int:
        return len(self.categories)

    def name(self, cat_id: int) -> str:
        self.check(cat_id)
        return self.categories[cat_id].name

    def color(self, cat_id: int) -> str:
        self.check(cat_id)
        return self.categories[cat_id].color

    def check(self, cat_id: int) -> int:
        if not isinstance(cat_id, (int,)) or not 0 <= cat_id < len(self.categories):
            raise UnknownCategory(f"category id {cat_id!r} not in 0..{len(self.categories) - 1}")
        return cat_id

    def remap_source(self, src_id: int) -> int | None:
        """Category for a source label, or None for background."""
        if src_id not in SOURCE_TO_CATEGORY:
            raise UnknownCategory(f"source label {src_id!r} not in 0..{N_SOURCE_LABELS - 1}")
        return SOURCE_TO_CATEGORY[src_id]

    def boundary_category(self, src_a: int, src_b: int) -> int | None:
        """Boundary category for an unordered source-label pair, if any."""
        return BOUNDARY_PAIRS.get(frozenset((src_a, src_b)))

    def to_json(self) -> str:
        entries = [{"id": c.id, "name": c.name, "color": c.color} for c in self.categories]
        return json.dumps(entries, indent=2)


DEFAULT_SCHEME = CategoryScheme()
