"""Per-frame descriptor store for all four retrieval models, with vectorized
linear-scan search and a versioned, checksummed binary file format."""
from __future__ import annotations

import json
import struct
import zlib
from dataclasses import asdict, dataclass, field

import numpy as np

from .descriptors import (
    ACC,
    BOVW,
    CEDD,
    MODEL_DIMS,
    PHOG,
    Descriptor,
    extract_acc,
    extract_cedd,
    extract_phog,
)
from .errors import (
    ChecksumMismatch,
    DuplicateFrame,
    EmptyIndex,
    FormatVersionMismatch,
    ModelMismatch,
    VocabularyMissing,
)
from .imaging import PixelGrid, to_grayscale
from .local import Vocabulary, describe_local, detect_keypoints, encode_bovw

MAGIC = b"EVIR"
FORMAT_VERSION = 1
MODELS = (CEDD, ACC, PHOG, BOVW)


@dataclass(frozen=True)
class FrameRef:
    video_id: str
    frame_index: int
    timestamp: float


@dataclass(frozen=True)
class RankEntry:
    doc: int
    score: float
    rank: int


@dataclass(frozen=True)
class RankedList:
    model: str
    entries: tuple[RankEntry, ...]


@dataclass
class IndexConfig:
    sampling_fps: float = 5.0
    detector_threshold: float = 2e-5
    detector_octaves: int = 3
    max_keypoints: int = 80
    fusion_top_n: int = 50
    frame_cap: int = 10
    video_cap: int = 3


class Index:
    """Immutable-after-build store: dense DocIds, one descriptor row per model."""

    def __init__(self, config: IndexConfig | None = None,
                 vocabulary: Vocabulary | None = None):
        self.config = config or IndexConfig()
        self.vocabulary = vocabulary
        self.frames: list[FrameRef] = []
        self.sources: dict[str, str] = {}
        self._rows: dict[str, list[np.ndarray]] = {m: [] for m in MODELS}
        self._keys: set[tuple[str, int]] = set()
        self._matrix_cache: dict[str, np.ndarray] = {}

    def __len__(self) -> int:
        return len(self.frames)

    def extract_all(self, img: PixelGrid) -> dict[str, np.ndarray]:
        """All four descriptor rows for one frame image."""
        if self.vocabulary is None:
            raise VocabularyMissing("train or load a vocabulary before indexing frames")
        luma = to_grayscale(img)
        kps = detect_keypoints(
            luma,
            threshold=self.config.detector_threshold,
            octaves=self.config.detector_octaves,
            max_keypoints=self.config.max_keypoints,
        )
        hist = encode_bovw(describe_local(img, kps), self.vocabulary)
        return {
            CEDD: extract_cedd(img).values,
            ACC: extract_acc(img).values,
            PHOG: extract_phog(img).values,
            BOVW: hist.counts.astype(np.float32),
        }

    def add_frame(self, frame: FrameRef, img: PixelGrid) -> int:
        return self.add_frame_rows(frame, self.extract_all(img))

    def add_frame_rows(self, frame: FrameRef, rows: dict[str, np.ndarray]) -> int:
        key = (frame.video_id, frame.frame_index)
        if key in self._keys:
            raise DuplicateFrame(f"frame {key} already indexed")
        for m in MODELS:
            row = np.asarray(rows[m])
            dim = self._model_dim(m)
            if row.shape != (dim,):
                raise ModelMismatch(f"{m} row has shape {row.shape}, expected ({dim},)")
            self._rows[m].append(row)
        self._keys.add(key)
        self.frames.append(frame)
        self._matrix_cache.clear()
        return len(self.frames) - 1

    def _model_dim(self, model: str) -> int:
        if model == BOVW and self.vocabulary is not None:
            return self.vocabulary.k
        return MODEL_DIMS[model]

    def matrix(self, model: str) -> np.ndarray:
        if model not in self._matrix_cache:
            dtype = np.float32
            rows = self._rows[model]
            self._matrix_cache[model] = (
                np.stack(rows).astype(dtype)
                if rows else np.empty((0, self._model_dim(model)), dtype=dtype)
            )
        return self._matrix_cache[model]

    def scores(self, model: str, query: Descriptor) -> np.ndarray:
        """Similarity of the query against every stored frame of one model."""
        if query.model != model:
            raise ModelMismatch(f"query model {query.model} != {model}")
        m = self.matrix(model)
        q = query.values.astype(np.float32)
        if model == CEDD:
            dot = m @ q
            denom = (m * m).sum(axis=1) + float(q @ q) - dot
            dist = np.where(denom > 0, 1.0 - dot / np.where(denom > 0, denom, 1.0), 0.0)
            return 1.0 / (1.0 + dist)
        if model == BOVW:
            return np.clip(m @ q, 0.0, 1.0)
        dist = np.abs(m - q).sum(axis=1)
        return 1.0 / (1.0 + dist)

    def search_model(self, model: str, query: Descriptor, top_n: int) -> RankedList:
        if top_n < 1:
            raise ValueError("top_n must be >= 1")
        if not self.frames:
            raise EmptyIndex("index holds no frames")
        sims = self.scores(model, query).astype(np.float64)
        order = np.lexsort((np.arange(len(sims)), -sims))[:top_n]
        entries = tuple(
            RankEntry(int(doc), float(sims[doc]), r + 1) for r, doc in enumerate(order)
        )
        return RankedList(model, entries)

    # ---- persistence ----

    def persist(self, path) -> None:
        body = bytearray()
        meta = {"config": asdict(self.config), "sources": self.sources}
        meta_bytes = json.dumps(meta, sort_keys=True).encode("utf-8")
        body += struct.pack("<I", len(meta_bytes)) + meta_bytes

        body += struct.pack("<I", len(self.frames))
        for f in self.frames:
            vid = f.video_id.encode("utf-8")
            body += struct.pack("<H", len(vid)) + vid
            body += struct.pack("<Id", f.frame_index, f.timestamp)

        if self.vocabulary is None:
            body += struct.pack("<B", 0)
        else:
            v = self.vocabulary
            body += struct.pack("<B", 1)
            body += struct.pack("<IIqI", v.centroids.shape[0], v.centroids.shape[1],
                                v.seed, v.iterations_run)
            body += v.centroids.astype("<f4").tobytes()

        for m in MODELS:
            mat = self.matrix(m)
            body += struct.pack("<BI", MODELS.index(m), mat.shape[0])
            if m == CEDD:
                body += np.stack(self._rows[m]).astype(np.uint8).tobytes() if self._rows[m] else b""
            else:
                body += mat.astype("<f4").tobytes()

        crc = zlib.crc32(bytes(body))
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<H", FORMAT_VERSION))
            fh.write(body)
            fh.write(struct.pack("<I", crc))


def load(path) -> Index:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 10 or blob[:4] != MAGIC:
        raise FormatVersionMismatch("not an EVIR index file")
    (version,) = struct.unpack("<H", blob[4:6])
    if version != FORMAT_VERSION:
        raise FormatVersionMismatch(f"format version {version} not supported")
    body, crc_bytes = blob[6:-4], blob[-4:]
    (crc,) = struct.unpack("<I", crc_bytes)
    if zlib.crc32(body) != crc:
        raise ChecksumMismatch("index file body fails CRC32 check")

    off = 0

    def take(n: int) -> bytes:
        nonlocal off
        chunk = body[off:off + n]
        if len(chunk) != n:
            raise ChecksumMismatch("index file body shorter than declared")
        off += n
        return chunk

    (meta_len,) = struct.unpack("<I", take(4))
    meta = json.loads(take(meta_len).decode("utf-8"))
    idx = Index(config=IndexConfig(**meta["config"]))
    idx.sources = dict(meta.get("sources", {}))

    (n_frames,) = struct.unpack("<I", take(4))
    for _ in range(n_frames):
        (vid_len,) = struct.unpack("<H", take(2))
        vid = take(vid_len).decode("utf-8")
        frame_index, timestamp = struct.unpack("<Id", take(12))
        idx.frames.append(FrameRef(vid, frame_index, timestamp))
        idx._keys.add((vid, frame_index))

    (has_vocab,) = struct.unpack("<B", take(1))
    if has_vocab:
        k, dim, seed, iters = struct.unpack("<IIqI", take(20))
        cents = np.frombuffer(take(k * dim * 4), dtype="<f4").reshape(k, dim)
        idx.vocabulary = Vocabulary(cents.astype(np.float64), int(seed), int(iters))

    for m in MODELS:
        tag, count = struct.unpack("<BI", take(5))
        if tag != MODELS.index(m) or count != n_frames:
            raise ChecksumMismatch("descriptor block does not match frame table")
        dim = idx._model_dim(m)
        if m == CEDD:
            mat = np.frombuffer(take(count * dim), dtype=np.uint8).reshape(count, dim)
        else:
            mat = np.frombuffer(take(count * dim * 4), dtype="<f4").reshape(count, dim)
        idx._rows[m] = [mat[i].copy() for i in range(count)]

    return idx
