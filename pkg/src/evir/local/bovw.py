"""Bag-of-visual-words encoding against a trained vocabulary."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import VocabularyMissing
from .vocabulary import Vocabulary, _as_matrix, _sq_dists


@dataclass(frozen=True)
class BovwHistogram:
    counts: np.ndarray = field(repr=False)  # (k,) float64, L2-normalized unless empty
    raw_count: int = 0


def assign_words(descs, vocab: Vocabulary) -> np.ndarray:
    """Nearest-centroid index per descriptor (L2, ties to the lowest index)."""
    x = _as_matrix(descs)
    return _sq_dists(x, vocab.centroids).argmin(axis=1)


def encode_bovw(descs, vocab: Vocabulary) -> BovwHistogram:
    """Hard-assigned term-frequency histogram, L2-normalized (all-zero if empty)."""
    if vocab is None:
        raise VocabularyMissing("no vocabulary trained")
    counts = np.zeros(vocab.k, dtype=np.float64)
    if len(descs) == 0:
        return BovwHistogram(counts, 0)
    words = assign_words(descs, vocab)
    np.add.at(counts, words, 1.0)
    raw = int(counts.sum())
    norm = np.linalg.norm(counts)
    return BovwHistogram(counts / norm, raw)


def bovw_similarity(a: BovwHistogram, b: BovwHistogram) -> float:
    """Cosine similarity of the normalized histograms; 0 when either is empty."""
    if a.raw_count == 0 or b.raw_count == 0:
        return 0.0
    return float(np.clip(a.counts @ b.counts, 0.0, 1.0))
