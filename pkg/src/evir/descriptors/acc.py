"""Auto color correlogram: per-color self-co-occurrence probability at fixed
chessboard distances, over a 64-color uniform RGB quantization."""
from __future__ import annotations

import numpy as np

from ..errors import ImageTooSmall
from ..imaging import PixelGrid
from .base import ACC, Descriptor

MIN_SIZE = 8
N_COLORS = 64  # 4 x 4 x 4 uniform RGB
DISTANCES = (1, 3, 5, 7)


def quantize_colors(img: PixelGrid) -> np.ndarray:
    """Map each pixel to one of 64 colors: (r//64)*16 + (g//64)*4 + b//64."""
    p = img.pixels.astype(np.int64) >> 6
    return p[:, :, 0] * 16 + p[:, :, 1] * 4 + p[:, :, 2]


def _ring_offsets(d: int) -> list[tuple[int, int]]:
    """All (dy, dx) at L-infinity distance exactly d."""
    offsets = []
    for dy in range(-d, d + 1):
        for dx in range(-d, d + 1):
            if max(abs(dy), abs(dx)) == d:
                offsets.append((dy, dx))
    return offsets


def extract_acc(img: PixelGrid) -> Descriptor:
    """256 values: for each color c and d in {1,3,5,7}, the probability that a
    pixel at chessboard distance d from a pixel of color c also has color c,
    with off-image ring positions excluded from the denominator."""
    if img.width < MIN_SIZE or img.height < MIN_SIZE:
        raise ImageTooSmall(f"ACC needs at least {MIN_SIZE}x{MIN_SIZE}, got {img.width}x{img.height}")

    q = quantize_colors(img)
    h, w = q.shape
    out = np.zeros((N_COLORS, len(DISTANCES)), dtype=np.float64)

    counts = np.bincount(q.reshape(-1), minlength=N_COLORS).astype(np.float64)

    for di, d in enumerate(DISTANCES):
        same = np.zeros(N_COLORS, dtype=np.float64)   # same-color neighbor count per color
        valid = np.zeros(N_COLORS, dtype=np.float64)  # in-bounds neighbor count per color
        for dy, dx in _ring_offsets(d):
            sy0, sy1 = max(0, -dy), min(h, h - dy)
            sx0, sx1 = max(0, -dx), min(w, w - dx)
            if sy0 >= sy1 or sx0 >= sx1:
                continue
            src = q[sy0:sy1, sx0:sx1]
            dst = q[sy0 + dy:sy1 + dy, sx0 + dx:sx1 + dx]
            valid += np.bincount(src.reshape(-1), minlength=N_COLORS)
            match = src == dst
            if match.any():
                same += np.bincount(src[match].reshape(-1), minlength=N_COLORS)
        present = (counts > 0) & (valid > 0)
        out[present, di] = same[present] / valid[present]

    return Descriptor(ACC, out.reshape(256).astype(np.float32))
