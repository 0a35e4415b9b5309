"""Scale-proportional patch extraction and per-patch CEDD description."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..descriptors.cedd import extract_cedd
from ..imaging import PixelGrid, resize
from .detector import Keypoint

PATCH_SCALE_FACTOR = 10.0
PATCH_MIN_SIDE = 16
PATCH_MAX_SIDE = 128
PATCH_OUT_SIDE = 40


@dataclass(frozen=True)
class LocalDescriptor:
    """CEDD vector of one keypoint's patch."""

    keypoint: Keypoint
    values: np.ndarray = field(repr=False)


def patch_side(scale: float) -> int:
    return int(min(PATCH_MAX_SIDE, max(PATCH_MIN_SIDE, round(PATCH_SCALE_FACTOR * scale))))


def extract_patch(img: PixelGrid, kp: Keypoint) -> PixelGrid:
    """Square patch of side round(10 * scale) clamped to [16, 128], centered on
    the keypoint, clipped at borders, resized to 40x40."""
    side = patch_side(kp.scale)
    cx, cy = int(round(kp.x)), int(round(kp.y))
    x0 = max(0, cx - side // 2)
    y0 = max(0, cy - side // 2)
    x1 = min(img.width, x0 + side)
    y1 = min(img.height, y0 + side)
    x0 = max(0, x1 - side)
    y0 = max(0, y1 - side)
    crop = PixelGrid(img.pixels[y0:y1, x0:x1])
    return resize(crop, PATCH_OUT_SIDE, PATCH_OUT_SIDE)


def describe_local(img: PixelGrid, kps: list[Keypoint]) -> list[LocalDescriptor]:
    """One CEDD local descriptor per keypoint, order preserved."""
    out = []
    for kp in kps:
        desc = extract_cedd(extract_patch(img, kp))
        out.append(LocalDescriptor(kp, desc.values))
    return out
