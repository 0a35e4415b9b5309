"""Synthetic desk-scale corpus: procedurally textured scenes with per-frame
drift, plus recompression/brightness-jittered queries with ground truth."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .imaging import PixelGrid, decode_image, encode_jpeg, encode_png


@dataclass(frozen=True)
class CorpusSpec:
    n_videos: int = 20
    frames_per_video: int = 50
    width: int = 128
    height: int = 96
    fps: float = 5.0
    seed: int = 7
    n_queries: int = 100
    jpeg_quality: int = 75
    brightness_jitter: float = 0.05


def _scene_params(rng: np.random.Generator, spec: CorpusSpec) -> dict:
    n_blobs = int(rng.integers(6, 11))
    return {
        "bg_color": rng.uniform(20, 200, size=3),
        "bg_dir": rng.uniform(-1, 1, size=2),
        "blob_xy": rng.uniform([0, 0], [spec.width, spec.height], size=(n_blobs, 2)),
        "blob_r": rng.uniform(4, 14, size=n_blobs),
        "blob_color": rng.uniform(0, 255, size=(n_blobs, 3)),
        "blob_drift": rng.uniform(-0.8, 0.8, size=(n_blobs, 2)),
        "stripe_period": float(rng.uniform(6, 16)),
        "stripe_angle": float(rng.uniform(0, np.pi)),
        "stripe_strength": float(rng.uniform(8, 25)),
    }


def render_frame(params: dict, t: int, spec: CorpusSpec) -> PixelGrid:
    """One frame of a scene: gradient background, drifting colored blobs,
    a faint oriented stripe texture."""
    w, h = spec.width, spec.height
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)

    dx, dy = params["bg_dir"]
    ramp = (xs * dx + ys * dy) / max(w, h)
    img = params["bg_color"][None, None, :] + 40.0 * ramp[:, :, None]

    ang = params["stripe_angle"]
    phase = (xs * np.cos(ang) + ys * np.sin(ang)) / params["stripe_period"]
    img += params["stripe_strength"] * np.sin(2 * np.pi * phase)[:, :, None]

    for (x0, y0), r, color, (vx, vy) in zip(
        params["blob_xy"], params["blob_r"], params["blob_color"], params["blob_drift"]
    ):
        cx = (x0 + vx * t) % w
        cy = (y0 + vy * t) % h
        d2 = (xs - cx) ** 2 + (ys - cy) ** 2
        mask = np.exp(-d2 / (2.0 * r * r))
        img = img * (1.0 - mask[:, :, None]) + color[None, None, :] * mask[:, :, None]

    return PixelGrid(np.clip(img, 0, 255).astype(np.uint8))


def generate_corpus(outdir, spec: CorpusSpec | None = None) -> dict:
    """Write videos/<id>/ frame directories, manifest.tsv, queries/ and
    ground_truth.tsv under outdir; returns the paths."""
    spec = spec or CorpusSpec()
    rng = np.random.default_rng(spec.seed)
    out = Path(outdir)
    videos_dir = out / "videos"
    queries_dir = out / "queries"
    videos_dir.mkdir(parents=True, exist_ok=True)
    queries_dir.mkdir(parents=True, exist_ok=True)

    manifest_lines = []
    frames: dict[str, list[PixelGrid]] = {}
    for v in range(spec.n_videos):
        video_id = f"vid{v:03d}"
        params = _scene_params(rng, spec)
        vdir = videos_dir / video_id
        vdir.mkdir(exist_ok=True)
        frames[video_id] = []
        for t in range(spec.frames_per_video):
            frame = render_frame(params, t, spec)
            frames[video_id].append(frame)
            (vdir / f"frame_{t:06d}.png").write_bytes(encode_png(frame))
        manifest_lines.append(f"{video_id}\t{vdir}\t{spec.frames_per_video / spec.fps}")

    manifest_path = out / "manifest.tsv"
    manifest_path.write_text("\n".join(manifest_lines) + "\n", encoding="utf-8")

    gt_lines = []
    video_ids = sorted(frames)
    for q in range(spec.n_queries):
        video_id = video_ids[int(rng.integers(len(video_ids)))]
        t = int(rng.integers(spec.frames_per_video))
        query_id = f"q{q:04d}"
        img = jitter_query(frames[video_id][t], rng, spec)
        (queries_dir / f"{query_id}.jpg").write_bytes(encode_jpeg(img, quality=95))
        gt_lines.append(f"{query_id}\t{video_id}")

    gt_path = out / "ground_truth.tsv"
    gt_path.write_text("\n".join(gt_lines) + "\n", encoding="utf-8")
    return {
        "manifest": str(manifest_path),
        "queries": str(queries_dir),
        "ground_truth": str(gt_path),
        "videos": str(videos_dir),
    }


def jitter_query(frame: PixelGrid, rng: np.random.Generator, spec: CorpusSpec) -> PixelGrid:
    """JPEG recompression plus +-brightness_jitter multiplicative brightness."""
    factor = 1.0 + rng.uniform(-spec.brightness_jitter, spec.brightness_jitter)
    scaled = np.clip(frame.pixels.astype(np.float64) * factor, 0, 255).astype(np.uint8)
    recompressed = encode_jpeg(PixelGrid(scaled), quality=spec.jpeg_quality)
    return decode_image(recompressed)
