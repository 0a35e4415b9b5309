"""Corpus ingestion (frame sampling, two-pass index build) and the
precision@1..3 evaluation harness."""
from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

from .descriptors import BOVW
from .errors import DecoderFailed, QueryMissingFromGroundTruth, SourceMissing
from .fusion import ENGINE_A, ENGINE_B, ENGINE_C, run_engine
from .imaging import PixelGrid, decode_image, to_grayscale
from .index import FrameRef, Index, IndexConfig
from .local import describe_local, detect_keypoints, encode_bovw, train_vocabulary
from .videorank import aggregate_to_videos

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg"}
DEFAULT_ENGINES = (ENGINE_A, ENGINE_B, ENGINE_C)
DEFAULT_VOCAB_SAMPLE_BUDGET = 200_000


@dataclass(frozen=True)
class ManifestRecord:
    video_id: str
    source: str
    duration_hint: float | None = None


@dataclass(frozen=True)
class SamplingConfig:
    fps: float = 5.0

    def __post_init__(self):
        if self.fps <= 0:
            raise ValueError("fps must be > 0")


@dataclass(frozen=True)
class EngineStats:
    hits_at: tuple[int, int, int]  # queries whose gt video landed at position 1 / 2 / 3
    query_count: int

    @property
    def rates(self) -> tuple[float, float, float]:
        n = max(1, self.query_count)
        return tuple(h / n for h in self.hits_at)

    @property
    def top3_rate(self) -> float:
        return sum(self.hits_at) / max(1, self.query_count)


@dataclass(frozen=True)
class EvalReport:
    engines: dict[str, EngineStats]
    query_count: int


def parse_manifest(path) -> list[ManifestRecord]:
    """UTF-8 lines: video_id <TAB> source [<TAB> duration_hint]; # comments."""
    records = []
    seen = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) < 2:
            raise ValueError(f"bad manifest line: {line!r}")
        vid = parts[0]
        if vid in seen:
            raise ValueError(f"duplicate video_id {vid!r} in manifest")
        seen.add(vid)
        hint = float(parts[2]) if len(parts) > 2 else None
        records.append(ManifestRecord(vid, parts[1], hint))
    return records


def _frame_files(directory: Path) -> list[Path]:
    return sorted(
        p for p in directory.iterdir()
        if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES
    )


def sample_frames(video_id: str, source, config: SamplingConfig,
                  decoder_cmd: str | None = None) -> Iterator[tuple[FrameRef, PixelGrid]]:
    """Frames at timestamps i / fps. Directory sources are read in lexicographic
    filename order; video files go through the configured external decoder."""
    src = Path(source)
    if not src.exists():
        raise SourceMissing(f"source {source} for video {video_id!r} does not exist")

    if src.is_dir():
        for i, path in enumerate(_frame_files(src)):
            yield FrameRef(video_id, i, i / config.fps), decode_image(path.read_bytes())
        return

    if decoder_cmd is None:
        decoder_cmd = os.environ.get("EVIR_DECODER_CMD")
    if decoder_cmd is None:
        raise DecoderFailed(
            f"video-file source {source} needs a decoder command "
            "(--decoder-cmd or EVIR_DECODER_CMD)"
        )
    with tempfile.TemporaryDirectory(prefix="evir-decode-") as tmp:
        cmd = decoder_cmd.format(source=str(src), fps=config.fps, outdir=tmp)
        proc = subprocess.run(shlex.split(cmd), capture_output=True)
        if proc.returncode != 0:
            raise DecoderFailed(
                f"decoder exited {proc.returncode} for {video_id!r}: "
                f"{proc.stderr.decode(errors='replace')[:500]}"
            )
        files = _frame_files(Path(tmp))
        if not files:
            raise DecoderFailed(f"decoder produced no frames for {video_id!r}")
        for i, path in enumerate(files):
            yield FrameRef(video_id, i, i / config.fps), decode_image(path.read_bytes())


def build_index(manifest: list[ManifestRecord], config: IndexConfig | None = None,
                seed: int = 0, vocab_k: int = 512,
                vocab_sample_budget: int = DEFAULT_VOCAB_SAMPLE_BUDGET,
                vocab_max_iter: int = 20,
                decoder_cmd: str | None = None,
                progress=None) -> Index:
    """Two-pass build: sample local descriptors and train the vocabulary, then
    extract and store all four descriptors for every frame."""
    config = config or IndexConfig()
    sampling = SamplingConfig(config.sampling_fps)

    for rec in manifest:
        if not Path(rec.source).exists():
            raise SourceMissing(f"source {rec.source} for video {rec.video_id!r} does not exist")

    # pass 1: local descriptors per frame (cached for pass 2) + vocabulary
    local_cache: dict[tuple[str, int], list] = {}
    all_samples = []
    for rec in manifest:
        try:
            for ref, img in sample_frames(rec.video_id, rec.source, sampling, decoder_cmd):
                kps = detect_keypoints(
                    to_grayscale(img),
                    threshold=config.detector_threshold,
                    octaves=config.detector_octaves,
                    max_keypoints=config.max_keypoints,
                )
                descs = describe_local(img, kps)
                local_cache[(ref.video_id, ref.frame_index)] = descs
                all_samples.extend(descs)
        except Exception as exc:
            raise type(exc)(f"[video {rec.video_id!r}] {exc}") from exc

    rng = np.random.default_rng(seed)
    if len(all_samples) > vocab_sample_budget:
        keep = rng.choice(len(all_samples), size=vocab_sample_budget, replace=False)
        samples = [all_samples[i] for i in sorted(keep)]
    else:
        samples = all_samples
    k = min(vocab_k, len(samples)) if samples else 0
    if k == 0:
        raise DecoderFailed("no local descriptors found in the whole corpus")
    vocab = train_vocabulary(samples, k=k, seed=seed, max_iter=vocab_max_iter)

    # pass 2: full extraction and insertion in frame order
    idx = Index(config=config, vocabulary=vocab)
    for rec in manifest:
        idx.sources[rec.video_id] = str(rec.source)
        try:
            for ref, img in sample_frames(rec.video_id, rec.source, sampling, decoder_cmd):
                rows = {m: v for m, v in _global_rows(idx, img).items()}
                descs = local_cache.get((ref.video_id, ref.frame_index))
                if descs is None:
                    rows[BOVW] = idx.extract_all(img)[BOVW]
                else:
                    hist = encode_bovw(descs, vocab)
                    rows[BOVW] = hist.counts.astype(np.float32)
                idx.add_frame_rows(ref, rows)
                if progress is not None:
                    progress(len(idx))
        except Exception as exc:
            raise type(exc)(f"[video {rec.video_id!r}] {exc}") from exc
    return idx


def _global_rows(idx: Index, img: PixelGrid) -> dict:
    from .descriptors import ACC, CEDD, PHOG, extract_acc, extract_cedd, extract_phog

    return {
        CEDD: extract_cedd(img).values,
        ACC: extract_acc(img).values,
        PHOG: extract_phog(img).values,
    }


def parse_ground_truth(path) -> dict[str, str]:
    """UTF-8 lines: query_id <TAB> source_video_id."""
    gt = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        query_id, video_id = line.split("\t")[:2]
        gt[query_id] = video_id
    return gt


def evaluate(idx: Index, queries: list[tuple[str, PixelGrid]], gt: dict[str, str],
             engines=DEFAULT_ENGINES, frame_cap: int | None = None,
             video_cap: int | None = None) -> EvalReport:
    """Per engine: at which position (1-3, or miss) the ground-truth video
    appears among the returned videos."""
    for query_id, _ in queries:
        if query_id not in gt:
            raise QueryMissingFromGroundTruth(f"query {query_id!r} has no ground truth")
    frame_cap = frame_cap if frame_cap is not None else idx.config.frame_cap
    video_cap = video_cap if video_cap is not None else idx.config.video_cap

    stats = {}
    for engine in engines:
        hits = [0, 0, 0]
        for query_id, img in queries:
            fused = run_engine(idx, img, engine)
            result = aggregate_to_videos(
                fused, idx.frames, frame_cap, video_cap, query_id, engine
            )
            for pos, hit in enumerate(result.videos[:3], start=1):
                if hit.video_id == gt[query_id]:
                    hits[pos - 1] += 1
                    break
        stats[engine] = EngineStats(tuple(hits), len(queries))
    return EvalReport(stats, len(queries))
