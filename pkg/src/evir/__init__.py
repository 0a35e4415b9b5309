"""Query-by-image retrieval over sampled video frames: three global
descriptors, a SIMPLE-CEDD BoVW local model, late fusion, and video ranking."""

from .imaging import PixelGrid, LumaGrid, IntegralGrid, decode_image
from .index import FrameRef, Index, IndexConfig, RankedList, load
from .fusion import FusedList, FusionConfig, run_engine
from .videorank import QueryResult, VideoHit, aggregate_to_videos

__version__ = "0.1.0"

__all__ = [
    "PixelGrid", "LumaGrid", "IntegralGrid", "decode_image",
    "FrameRef", "Index", "IndexConfig", "RankedList", "load",
    "FusedList", "FusionConfig", "run_engine",
    "QueryResult", "VideoHit", "aggregate_to_videos",
    "__version__",
]
