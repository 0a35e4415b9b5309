"""Pyramid histogram of oriented gradients: Sobel orientation in [0, 360),
magnitude soft-assigned over 30 bins, pyramid levels 0-2, L1-normalized."""
from __future__ import annotations

import numpy as np

from ..errors import ImageTooSmall
from ..imaging import PixelGrid, to_grayscale
from .base import PHOG, Descriptor

MIN_SIZE = 8
N_BINS = 30
BIN_WIDTH = 360.0 / N_BINS
LEVELS = (1, 2, 4)  # cells per axis at pyramid levels 0, 1, 2
DIM = sum(n * n for n in LEVELS) * N_BINS  # 630


def sobel_gradients(luma: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(gx, gy) with replicated borders; gx positive toward +x, gy toward +y."""
    padded = np.pad(luma, 1, mode="edge")
    # smooth across, difference along
    gx = (
        (padded[:-2, 2:] + 2 * padded[1:-1, 2:] + padded[2:, 2:])
        - (padded[:-2, :-2] + 2 * padded[1:-1, :-2] + padded[2:, :-2])
    )
    gy = (
        (padded[2:, :-2] + 2 * padded[2:, 1:-1] + padded[2:, 2:])
        - (padded[:-2, :-2] + 2 * padded[:-2, 1:-1] + padded[:-2, 2:])
    )
    return gx, gy


def extract_phog(img: PixelGrid) -> Descriptor:
    """630-value PHOG; all-zero when the image has no gradient at all."""
    if img.width < MIN_SIZE or img.height < MIN_SIZE:
        raise ImageTooSmall(f"PHOG needs at least {MIN_SIZE}x{MIN_SIZE}, got {img.width}x{img.height}")

    luma = to_grayscale(img).values
    gx, gy = sobel_gradients(luma)
    mag = np.hypot(gx, gy)
    if not np.any(mag > 0):
        return Descriptor(PHOG, np.zeros(DIM, dtype=np.float32))

    theta = np.degrees(np.arctan2(gy, gx)) % 360.0
    # soft assignment to the two nearest bins (bin i centered at i * BIN_WIDTH)
    pos = theta / BIN_WIDTH
    lo = np.floor(pos).astype(np.int64) % N_BINS
    hi = (lo + 1) % N_BINS
    frac = pos - np.floor(pos)
    w_lo = mag * (1.0 - frac)
    w_hi = mag * frac

    h, w = luma.shape
    parts = []
    for cells in LEVELS:
        ye = (np.arange(cells + 1) * h) // cells
        xe = (np.arange(cells + 1) * w) // cells
        for cy in range(cells):
            for cx in range(cells):
                sl = (slice(ye[cy], ye[cy + 1]), slice(xe[cx], xe[cx + 1]))
                hist = np.bincount(lo[sl].reshape(-1), weights=w_lo[sl].reshape(-1), minlength=N_BINS)
                hist += np.bincount(hi[sl].reshape(-1), weights=w_hi[sl].reshape(-1), minlength=N_BINS)
                parts.append(hist)
    vec = np.concatenate(parts)
    total = vec.sum()
    if total > 0:
        vec = vec / total
    return Descriptor(PHOG, vec.astype(np.float32))
