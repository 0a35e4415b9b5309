"""Exception types raised across the engine."""


class EvirError(Exception):
    """Base class for all engine errors."""


class DecodeError(EvirError):
    """Image payload is malformed."""


class UnsupportedFormat(EvirError):
    """Image container is not PNG or JPEG."""


class BadDimensions(EvirError):
    """Requested image dimensions are invalid."""


class ImageTooSmall(EvirError):
    """Image is below the minimum size for the requested descriptor."""


class ModelMismatch(EvirError):
    """Descriptors (or query/table) belong to different retrieval models."""


class MetricMismatch(EvirError):
    """Distance metric is incompatible with the descriptor model."""


class NegativeDistance(EvirError):
    """Distance passed to the similarity mapping is negative."""


class NotEnoughSamples(EvirError):
    """Fewer training samples than requested clusters."""


class DuplicateFrame(EvirError):
    """(video_id, frame_index) already present in the index."""


class VocabularyMissing(EvirError):
    """BoVW encoding requested before a vocabulary was trained."""


class EmptyIndex(EvirError):
    """Search requested against an index with no frames."""


class RankExceedsN(EvirError):
    """Ranked list contains a rank beyond the truncation length N."""


class EmptyList(EvirError):
    """Score normalization requires a non-empty list."""


class ModelSetMismatch(EvirError):
    """Fusion inputs do not match the configured model set."""


class SourceMissing(EvirError):
    """Corpus manifest names a source path that does not exist."""


class DecoderFailed(EvirError):
    """External video decoder exited non-zero or produced no frames."""


class QueryMissingFromGroundTruth(EvirError):
    """Evaluation query has no ground-truth video."""


class FormatVersionMismatch(EvirError):
    """Index file magic or format version not understood."""


class ChecksumMismatch(EvirError):
    """Index file body fails its CRC32 check (truncated or corrupted)."""
