"""Aggregate the fused frame ranking into ranked videos with matched time points."""
from __future__ import annotations

from dataclasses import dataclass, field

from .fusion import FusedList
from .index import FrameRef

DEFAULT_FRAME_CAP = 10
DEFAULT_VIDEO_CAP = 3


@dataclass(frozen=True)
class VideoHit:
    video_id: str
    best_frame: FrameRef
    best_score: float
    matched_timestamps: tuple[float, ...]  # sorted ascending


@dataclass(frozen=True)
class QueryResult:
    query_id: str
    engine: str
    videos: tuple[VideoHit, ...]
    considered_frames: FusedList = field(default_factory=FusedList)


def aggregate_to_videos(fused: FusedList, frames, frame_cap: int = DEFAULT_FRAME_CAP,
                        video_cap: int = DEFAULT_VIDEO_CAP, query_id: str = "",
                        engine: str = "") -> QueryResult:
    """Top frame_cap fused frames, grouped by video; each video scored by its
    best frame; top video_cap videos kept with all their matched timestamps."""
    top = fused.entries[:frame_cap]

    best: dict[str, tuple[float, FrameRef]] = {}
    stamps: dict[str, list[float]] = {}
    for entry in top:
        ref = frames[entry.doc]
        vid = ref.video_id
        stamps.setdefault(vid, []).append(ref.timestamp)
        cur = best.get(vid)
        # ties between equal-scored frames resolve to the earliest frame
        if (cur is None or entry.fused_score > cur[0]
                or (entry.fused_score == cur[0] and ref.frame_index < cur[1].frame_index)):
            best[vid] = (entry.fused_score, ref)

    # best score descending, ties by ascending video_id
    ordered = sorted(best.items(), key=lambda kv: (-kv[1][0], kv[0]))[:video_cap]
    hits = tuple(
        VideoHit(vid, ref, score, tuple(sorted(stamps[vid])))
        for vid, (score, ref) in ordered
    )
    return QueryResult(query_id, engine, hits, FusedList(top))
