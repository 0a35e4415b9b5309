"""Pixel-level primitives: decoding, grayscale, HSV, bilinear resize, integral images."""
from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import BadDimensions, DecodeError, UnsupportedFormat

_SUPPORTED_FORMATS = {"PNG", "JPEG"}

# ITU-R 601 luma weights
_LUMA_R, _LUMA_G, _LUMA_B = 0.299, 0.587, 0.114


@dataclass(frozen=True)
class PixelGrid:
    """Decoded RGB raster, channels as uint8 in a (height, width, 3) array."""

    pixels: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.asarray(self.pixels, dtype=np.uint8)
        if p.ndim != 3 or p.shape[2] != 3 or p.shape[0] < 1 or p.shape[1] < 1:
            raise BadDimensions(f"expected (h, w, 3) array, got shape {p.shape}")
        object.__setattr__(self, "pixels", p)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class LumaGrid:
    """Row-major luminance values in [0, 255], shape (height, width)."""

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise BadDimensions(f"expected (h, w) array, got shape {v.shape}")
        object.__setattr__(self, "values", v)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class IntegralGrid:
    """Summed-area table of a LumaGrid, shape (height+1, width+1); row/col 0 are zero."""

    table: np.ndarray = field(repr=False)

    @property
    def width(self) -> int:
        return self.table.shape[1] - 1

    @property
    def height(self) -> int:
        return self.table.shape[0] - 1

    def rect_sum(self, x0: int, y0: int, x1: int, y1: int) -> float:
        """Sum of luma over pixels with x0 <= x < x1 and y0 <= y < y1."""
        t = self.table
        return float(t[y1, x1] - t[y0, x1] - t[y1, x0] + t[y0, x0])

    def rect_sums(self, x0, y0, x1, y1) -> np.ndarray:
        """Vectorized rect_sum over arrays of coordinates (clipped by the caller)."""
        t = self.table
        return t[y1, x1] - t[y0, x1] - t[y1, x0] + t[y0, x0]


def decode_image(payload: bytes) -> PixelGrid:
    """Decode a PNG or JPEG byte stream into a PixelGrid."""
    try:
        img = Image.open(io.BytesIO(payload))
        fmt = img.format
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise DecodeError(f"cannot decode image payload: {exc}") from exc
    if fmt not in _SUPPORTED_FORMATS:
        raise UnsupportedFormat(f"unsupported container {fmt!r}, expected PNG or JPEG")
    try:
        rgb = img.convert("RGB")
        arr = np.asarray(rgb, dtype=np.uint8)
    except OSError as exc:
        raise DecodeError(f"truncated or corrupt image payload: {exc}") from exc
    return PixelGrid(arr)


def encode_png(img: PixelGrid) -> bytes:
    """Lossless PNG encoding of a PixelGrid."""
    buf = io.BytesIO()
    Image.fromarray(img.pixels, mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def encode_jpeg(img: PixelGrid, quality: int = 90) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(img.pixels, mode="RGB").save(buf, format="JPEG", quality=quality)
    return buf.getvalue()


def to_grayscale(img: PixelGrid) -> LumaGrid:
    """ITU-R 601 luma: 0.299 r + 0.587 g + 0.114 b."""
    p = img.pixels.astype(np.float64)
    luma = _LUMA_R * p[:, :, 0] + _LUMA_G * p[:, :, 1] + _LUMA_B * p[:, :, 2]
    return LumaGrid(luma)


def rgb_to_hsv(r: float, g: float, b: float) -> tuple[float, float, float]:
    """Standard hexcone conversion; h in [0, 360) degrees (0 when s = 0), s and v in [0, 1]."""
    rf, gf, bf = r / 255.0, g / 255.0, b / 255.0
    v = max(rf, gf, bf)
    c = v - min(rf, gf, bf)
    s = 0.0 if v == 0 else c / v
    if c == 0:
        h = 0.0
    elif v == rf:
        h = 60.0 * (((gf - bf) / c) % 6.0)
    elif v == gf:
        h = 60.0 * ((bf - rf) / c + 2.0)
    else:
        h = 60.0 * ((rf - gf) / c + 4.0)
    if h >= 360.0:
        h -= 360.0
    return h, s, v


def rgb_to_hsv_array(rgb: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized hexcone conversion over an (..., 3) float array of [0, 255] channels."""
    p = np.asarray(rgb, dtype=np.float64) / 255.0
    r, g, b = p[..., 0], p[..., 1], p[..., 2]
    v = np.maximum(np.maximum(r, g), b)
    c = v - np.minimum(np.minimum(r, g), b)
    s = np.divide(c, v, out=np.zeros_like(v), where=v > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        hr = np.mod((g - b) / c, 6.0)
        hg = (b - r) / c + 2.0
        hb = (r - g) / c + 4.0
    h = np.zeros_like(v)
    chrom = c > 0
    h = np.where(chrom & (v == r), hr, h)
    h = np.where(chrom & (v == g) & (v != r), hg, h)
    h = np.where(chrom & (v == b) & (v != r) & (v != g), hb, h)
    h = np.where(chrom, h * 60.0, 0.0)
    h = np.where(h >= 360.0, h - 360.0, h)
    return h, s, v


def resize(img: PixelGrid, w: int, h: int) -> PixelGrid:
    """Bilinear resize with half-pixel-center sampling; identity when dimensions match."""
    if w < 1 or h < 1:
        raise BadDimensions(f"target dimensions must be >= 1, got {w}x{h}")
    sh, sw = img.height, img.width
    if (w, h) == (sw, sh):
        return PixelGrid(img.pixels.copy())

    src_x = (np.arange(w, dtype=np.float64) + 0.5) * (sw / w) - 0.5
    src_y = (np.arange(h, dtype=np.float64) + 0.5) * (sh / h) - 0.5
    src_x = np.clip(src_x, 0.0, sw - 1.0)
    src_y = np.clip(src_y, 0.0, sh - 1.0)

    x0 = np.floor(src_x).astype(np.int64)
    y0 = np.floor(src_y).astype(np.int64)
    x1 = np.minimum(x0 + 1, sw - 1)
    y1 = np.minimum(y0 + 1, sh - 1)
    fx = (src_x - x0)[np.newaxis, :, np.newaxis]
    fy = (src_y - y0)[:, np.newaxis, np.newaxis]

    p = img.pixels.astype(np.float64)
    top = p[y0][:, x0] * (1 - fx) + p[y0][:, x1] * fx
    bot = p[y1][:, x0] * (1 - fx) + p[y1][:, x1] * fx
    out = top * (1 - fy) + bot * fy
    return PixelGrid(np.clip(np.rint(out), 0, 255).astype(np.uint8))


def integral_image(luma: LumaGrid) -> IntegralGrid:
    """Summed-area table with a zero top row and left column."""
    h, w = luma.values.shape
    table = np.zeros((h + 1, w + 1), dtype=np.float64)
    np.cumsum(np.cumsum(luma.values, axis=0), axis=1, out=table[1:, 1:])
    return IntegralGrid(table)
