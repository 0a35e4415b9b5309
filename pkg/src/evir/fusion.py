"""Late fusion of per-model ranked lists: rank/score normalization onto [0, 1],
sum aggregation over models, and the three search engines A, B, C."""
from __future__ import annotations

from dataclasses import dataclass, field

from .descriptors import ACC, BOVW, CEDD, PHOG, Descriptor, extract_acc, extract_cedd, extract_phog
from .errors import EmptyIndex, EmptyList, ModelSetMismatch, RankExceedsN
from .imaging import PixelGrid, to_grayscale
from .index import Index, RankedList
from .local import describe_local, detect_keypoints, encode_bovw

GLOBAL_MODELS = (CEDD, ACC, PHOG)

SUM_OF_RANKS = "SumOfRanks"
SUM_OF_SCORES = "SumOfScores"

ENGINE_A = "A"  # sum-of-ranks fusion of the global models
ENGINE_B = "B"  # sum-of-scores fusion of the global models
ENGINE_C = "C"  # local BoVW search, no fusion


@dataclass(frozen=True)
class NormalizedList:
    model: str
    entries: tuple[tuple[int, float], ...]  # (doc, normalized value)
    N: int


@dataclass(frozen=True)
class FusionConfig:
    scheme: str = SUM_OF_RANKS
    N: int = 50
    models: tuple[str, ...] = GLOBAL_MODELS

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if not self.models or len(set(self.models)) != len(self.models):
            raise ValueError("models must be non-empty and distinct")


@dataclass(frozen=True)
class FusedEntry:
    doc: int
    fused_score: float
    rank: int


@dataclass(frozen=True)
class FusedList:
    entries: tuple[FusedEntry, ...] = ()


def normalize_by_rank(ranked: RankedList, N: int) -> NormalizedList:
    """Entry at rank r maps to (N + 1 - r) / N."""
    out = []
    for e in ranked.entries:
        if e.rank > N:
            raise RankExceedsN(f"rank {e.rank} exceeds N={N}")
        out.append((e.doc, (N + 1 - e.rank) / N))
    return NormalizedList(ranked.model, tuple(out), N)


def normalize_by_score(ranked: RankedList, N: int | None = None) -> NormalizedList:
    """Affine map of scores onto [0, 1]; all entries map to 1.0 when max = min."""
    if not ranked.entries:
        raise EmptyList("cannot score-normalize an empty ranked list")
    scores = [e.score for e in ranked.entries]
    lo, hi = min(scores), max(scores)
    span = hi - lo
    if span == 0:
        out = [(e.doc, 1.0) for e in ranked.entries]
    else:
        out = [(e.doc, (e.score - lo) / span) for e in ranked.entries]
    return NormalizedList(ranked.model, tuple(out), N if N is not None else len(out))


def fuse_sum(lists: list[NormalizedList], config: FusionConfig) -> FusedList:
    """Union over docs, summing each model's normalized value (0 when absent);
    sorted by fused score descending, ties by ascending DocId."""
    if sorted(l.model for l in lists) != sorted(config.models):
        raise ModelSetMismatch(
            f"got lists for {[l.model for l in lists]}, expected {list(config.models)}"
        )
    totals: dict[int, float] = {}
    for nl in lists:
        for doc, value in nl.entries:
            totals[doc] = totals.get(doc, 0.0) + value
    ordered = sorted(totals.items(), key=lambda kv: (-kv[1], kv[0]))
    return FusedList(tuple(
        FusedEntry(doc, score, rank + 1) for rank, (doc, score) in enumerate(ordered)
    ))


def query_descriptor(img: PixelGrid, model: str) -> Descriptor:
    if model == CEDD:
        return extract_cedd(img)
    if model == ACC:
        return extract_acc(img)
    if model == PHOG:
        return extract_phog(img)
    raise ValueError(f"no global extractor for model {model!r}")


def run_engine(idx: Index, query_img: PixelGrid, engine: str,
               config: FusionConfig | None = None) -> FusedList:
    """Engine A: sum-of-ranks global fusion. B: sum-of-scores. C: BoVW only."""
    if len(idx) == 0:
        raise EmptyIndex("index holds no frames")

    if engine == ENGINE_C:
        kps = detect_keypoints(
            to_grayscale(query_img),
            threshold=idx.config.detector_threshold,
            octaves=idx.config.detector_octaves,
            max_keypoints=idx.config.max_keypoints,
        )
        if not kps:
            return FusedList()
        hist = encode_bovw(describe_local(query_img, kps), idx.vocabulary)
        if hist.raw_count == 0:
            return FusedList()
        query = Descriptor(BOVW, hist.counts.astype("float32"))
        n = config.N if config is not None else idx.config.fusion_top_n
        ranked = idx.search_model(BOVW, query, n)
        return FusedList(tuple(
            FusedEntry(e.doc, e.score, e.rank) for e in ranked.entries
        ))

    if engine not in (ENGINE_A, ENGINE_B):
        raise ValueError(f"unknown engine {engine!r}")

    cfg = config or FusionConfig(
        scheme=SUM_OF_RANKS if engine == ENGINE_A else SUM_OF_SCORES,
        N=idx.config.fusion_top_n,
    )
    normalized = []
    for model in cfg.models:
        ranked = idx.search_model(model, query_descriptor(query_img, model), cfg.N)
        if engine == ENGINE_A:
            normalized.append(normalize_by_rank(ranked, cfg.N))
        else:
            normalized.append(normalize_by_score(ranked, cfg.N))
    return fuse_sum(normalized, cfg)
