"""Joint fuzzy color / edge-directivity histogram (144 bins, 3-bit quantized).

The image is split into a block grid; each block contributes fuzzy membership
over 24 HSV-derived colors to the texture class selected by five directional
2x2 digital filters on its luma sub-blocks. Bin layout is texture-major:
bin = texture_class * 24 + color.
"""
from __future__ import annotations

import numpy as np

from ..errors import ImageTooSmall
from ..imaging import PixelGrid, rgb_to_hsv_array, to_grayscale
from .base import CEDD, Descriptor

MIN_SIZE = 8
GRID = 40  # target blocks per axis, clamped so every block is >= 2x2 px

# texture classes
NO_EDGE, NON_DIRECTIONAL, HORIZONTAL, VERTICAL, DIAG_45, DIAG_135 = range(6)

# MPEG-7 EHD style filter coefficients over sub-block means (TL, TR, BL, BR)
_SQRT2 = np.sqrt(2.0)
_FILTERS = np.array(
    [
        [2.0, -2.0, -2.0, 2.0],        # non-directional
        [1.0, 1.0, -1.0, -1.0],        # horizontal
        [1.0, -1.0, 1.0, -1.0],        # vertical
        [_SQRT2, 0.0, 0.0, -_SQRT2],   # 45 degrees
        [0.0, _SQRT2, -_SQRT2, 0.0],   # 135 degrees
    ]
)
_FILTER_CLASS = np.array([NON_DIRECTIONAL, HORIZONTAL, VERTICAL, DIAG_45, DIAG_135])
EDGE_THRESHOLD = 11.0

# color bin layout: 0 black, 1 gray, 2 white, then 7 hue families x (normal, light, dark)
HUE_CENTERS = np.array([0.0, 30.0, 60.0, 120.0, 180.0, 240.0, 300.0])  # red..magenta
N_COLORS = 24


def _ramp(x: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """0 below lo, 1 above hi, linear between."""
    return np.clip((x - lo) / (hi - lo), 0.0, 1.0)


def _hue_memberships(h: np.ndarray) -> np.ndarray:
    """Triangular memberships over the 7 hue-family centers; rows sum to 1."""
    centers = np.concatenate([HUE_CENTERS, [360.0]])  # wrap red at 360
    m = np.zeros((h.shape[0], 7))
    idx = np.searchsorted(centers, h, side="right") - 1
    idx = np.clip(idx, 0, 6)
    left = centers[idx]
    right = centers[idx + 1]
    frac = (h - left) / (right - left)
    rows = np.arange(h.shape[0])
    np.add.at(m, (rows, idx), 1.0 - frac)
    np.add.at(m, (rows, (idx + 1) % 7), frac)
    return m


def fuzzy_color_memberships(h: np.ndarray, s: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Two-stage fuzzy color system: (n, 24) memberships, each row sums to 1."""
    chrom = _ramp(s, 0.10, 0.35) * _ramp(v, 0.10, 0.35)
    achrom = 1.0 - chrom

    black = 1.0 - _ramp(v, 0.25, 0.50)
    white = _ramp(v, 0.65, 0.90)
    gray = 1.0 - black - white

    hue_m = _hue_memberships(h)

    dark = 1.0 - _ramp(v, 0.35, 0.65)
    light = (1.0 - dark) * (1.0 - _ramp(s, 0.40, 0.80))
    normal = 1.0 - dark - light

    out = np.zeros((h.shape[0], N_COLORS))
    out[:, 0] = achrom * black
    out[:, 1] = achrom * gray
    out[:, 2] = achrom * white
    shades = np.stack([normal, light, dark], axis=1)  # (n, 3)
    # hue family i occupies bins 3+3i .. 3+3i+2
    out[:, 3:] = (chrom[:, None, None] * hue_m[:, :, None] * shades[:, None, :]).reshape(
        h.shape[0], 21
    )
    return out


def _block_edges(size: int, blocks: int) -> np.ndarray:
    return (np.arange(blocks + 1, dtype=np.int64) * size) // blocks


def classify_texture(sub_means: np.ndarray, threshold: float = EDGE_THRESHOLD) -> np.ndarray:
    """Texture class per block from its (n, 4) sub-block luma means (TL, TR, BL, BR)."""
    strengths = np.abs(sub_means @ _FILTERS.T)  # (n, 5)
    best = np.argmax(strengths, axis=1)
    classes = _FILTER_CLASS[best]
    return np.where(strengths.max(axis=1) >= threshold, classes, NO_EDGE)


def extract_cedd(img: PixelGrid) -> Descriptor:
    """144-bin CEDD histogram: 6 texture classes x 24 fuzzy colors, 3-bit quantized."""
    if img.width < MIN_SIZE or img.height < MIN_SIZE:
        raise ImageTooSmall(f"CEDD needs at least {MIN_SIZE}x{MIN_SIZE}, got {img.width}x{img.height}")

    w, h = img.width, img.height
    gw, gh = min(GRID, w // 2), min(GRID, h // 2)
    xs = _block_edges(w, gw)
    ys = _block_edges(h, gh)
    xm = (xs[:-1] + xs[1:]) // 2  # sub-block split columns
    ym = (ys[:-1] + ys[1:]) // 2

    luma = to_grayscale(img).values
    it = np.zeros((h + 1, w + 1))
    np.cumsum(np.cumsum(luma, axis=0), axis=1, out=it[1:, 1:])

    def rect_mean(x0, x1, y0, y1):
        area = (x1 - x0)[None, :] * (y1 - y0)[:, None]
        s = it[y1][:, x1] - it[y0][:, x1] - it[y1][:, x0] + it[y0][:, x0]
        return s / area

    x0, x1, xm_ = xs[:-1], xs[1:], xm
    y0, y1, ym_ = ys[:-1], ys[1:], ym
    tl = rect_mean(x0, xm_, y0, ym_)
    tr = rect_mean(xm_, x1, y0, ym_)
    bl = rect_mean(x0, xm_, ym_, y1)
    br = rect_mean(xm_, x1, ym_, y1)
    sub_means = np.stack([tl, tr, bl, br], axis=-1).reshape(-1, 4)
    texture = classify_texture(sub_means)  # (gh*gw,)

    # per-block mean RGB via per-channel integral images
    rgb_means = np.empty((gh * gw, 3))
    for c in range(3):
        ic = np.zeros((h + 1, w + 1))
        np.cumsum(np.cumsum(img.pixels[:, :, c].astype(np.float64), axis=0), axis=1, out=ic[1:, 1:])
        area = (x1 - x0)[None, :] * (y1 - y0)[:, None]
        s = ic[y1][:, x1] - ic[y0][:, x1] - ic[y1][:, x0] + ic[y0][:, x0]
        rgb_means[:, c] = (s / area).reshape(-1)

    hh, ss, vv = rgb_to_hsv_array(rgb_means)
    colors = fuzzy_color_memberships(hh, ss, vv)  # (n, 24)

    hist = np.zeros((6, N_COLORS))
    np.add.at(hist, texture, colors)

    flat = hist.reshape(144)
    peak = flat.max()
    if peak > 0:
        flat = flat / peak
    quantized = np.minimum(np.floor(flat * 8.0), 7.0).astype(np.uint8)
    return Descriptor(CEDD, quantized)
