"""Fast-Hessian blob detector over integral images (detection only, no
orientation): box-filter Hessian determinant at four filter sizes per octave,
3x3x3 scale-space non-maximum suppression."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import maximum_filter

from ..errors import ImageTooSmall
from ..imaging import LumaGrid

MIN_SIZE = 32
SCALES_PER_OCTAVE = 4
DXY_WEIGHT = 0.9
# peak response of this box-filter family to a Gaussian blob of scale sigma
# occurs at filter size ~5.5 sigma, so reported scale = size / 5.5
SIZE_PER_SIGMA = 5.5
DEFAULT_THRESHOLD = 2e-5
DEFAULT_OCTAVES = 3


@dataclass(frozen=True)
class Keypoint:
    x: float
    y: float
    scale: float
    response: float


def _filter_sizes(octaves: int) -> list[list[int]]:
    """SURF-style size ladder: 9,15,21,27 / 15,27,39,51 / 27,51,75,99 / ..."""
    sizes = []
    first, step = 9, 6
    for _ in range(octaves):
        sizes.append([first + i * step for i in range(SCALES_PER_OCTAVE)])
        first = first + step
        step *= 2
    return sizes


def _box(table: np.ndarray, h: int, w: int, x0: np.ndarray, y0: np.ndarray,
         bw: int, bh: int) -> np.ndarray:
    """Box sums at every pixel center; x0/y0 are top-left offsets relative to
    the pixel, bw/bh the box extents. Out-of-range boxes yield garbage at the
    borders, which the caller masks out."""
    ys, xs = np.mgrid[0:h, 0:w]
    ya = np.clip(ys + y0, 0, h)
    yb = np.clip(ys + y0 + bh, 0, h)
    xa = np.clip(xs + x0, 0, w)
    xb = np.clip(xs + x0 + bw, 0, w)
    return table[yb, xb] - table[ya, xb] - table[yb, xa] + table[ya, xa]


def hessian_response(table: np.ndarray, h: int, w: int, size: int) -> np.ndarray:
    """Normalized box-filter Hessian determinant for one filter size.
    Entries closer than size//2 to any border are set to -inf."""
    lobe = size // 3
    half = size // 2
    norm = 1.0 / (size * size)

    band_w = 2 * lobe - 1
    # Dyy: three vertically stacked lobe-high bands of width 2*lobe-1,
    # the middle band centered on the pixel (lobe is always odd here)
    x0 = -(band_w // 2)
    dyy = (
        _box(table, h, w, x0, -half, band_w, lobe)
        - 2.0 * _box(table, h, w, x0, -(lobe // 2), band_w, lobe)
        + _box(table, h, w, x0, half - lobe + 1, band_w, lobe)
    )
    dxx = (
        _box(table, h, w, -half, x0, lobe, band_w)
        - 2.0 * _box(table, h, w, -(lobe // 2), x0, lobe, band_w)
        + _box(table, h, w, half - lobe + 1, x0, lobe, band_w)
    )
    # Dxy: four lobe x lobe quadrant boxes separated by a one-pixel cross
    dxy = (
        _box(table, h, w, 1, -lobe, lobe, lobe)        # top-right (+)
        + _box(table, h, w, -lobe, 1, lobe, lobe)      # bottom-left (+)
        - _box(table, h, w, -lobe, -lobe, lobe, lobe)  # top-left (-)
        - _box(table, h, w, 1, 1, lobe, lobe)          # bottom-right (-)
    )

    dxx *= norm
    dyy *= norm
    dxy *= norm
    det = dxx * dyy - (DXY_WEIGHT * dxy) ** 2

    det[:half + 1, :] = -np.inf
    det[h - half - 1:, :] = -np.inf
    det[:, :half + 1] = -np.inf
    det[:, w - half - 1:] = -np.inf
    return det


def detect_keypoints(luma: LumaGrid, threshold: float = DEFAULT_THRESHOLD,
                     octaves: int = DEFAULT_OCTAVES,
                     max_keypoints: int | None = None) -> list[Keypoint]:
    """Keypoints sorted by descending response (ties: y, then x ascending)."""
    h, w = luma.height, luma.width
    if h < MIN_SIZE or w < MIN_SIZE:
        raise ImageTooSmall(f"detector needs at least {MIN_SIZE}x{MIN_SIZE}, got {w}x{h}")
    if octaves < 1:
        raise ValueError("octaves must be >= 1")
    if threshold <= 0:
        raise ValueError("threshold must be > 0")

    values = luma.values / 255.0
    table = np.zeros((h + 1, w + 1))
    np.cumsum(np.cumsum(values, axis=0), axis=1, out=table[1:, 1:])

    found: list[Keypoint] = []
    seen: set[tuple[int, int, int]] = set()
    for sizes in _filter_sizes(octaves):
        stack = np.stack([hessian_response(table, h, w, s) for s in sizes])
        local_max = maximum_filter(stack, size=3, mode="constant", cval=-np.inf)
        for si in range(1, SCALES_PER_OCTAVE - 1):
            resp = stack[si]
            mask = (resp > threshold) & (resp >= local_max[si]) & np.isfinite(resp)
            ys, xs = np.nonzero(mask)
            size = sizes[si]
            sigma = size / SIZE_PER_SIGMA
            for y, x in zip(ys.tolist(), xs.tolist()):
                key = (x, y, size)
                if key in seen:
                    continue
                seen.add(key)
                found.append(Keypoint(float(x), float(y), sigma, float(resp[y, x])))

    found.sort(key=lambda k: (-k.response, k.y, k.x, k.scale))
    if max_keypoints is not None:
        found = found[:max_keypoints]
    return found
