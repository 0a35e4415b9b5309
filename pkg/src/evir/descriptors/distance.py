"""Distance functions per retrieval model and the distance-to-score mapping."""
from __future__ import annotations

import numpy as np

from ..errors import MetricMismatch, ModelMismatch, NegativeDistance
from .base import ACC, BOVW, CEDD, PHOG, Descriptor

TANIMOTO = "tanimoto"
L1 = "l1"

_ALLOWED = {
    TANIMOTO: {CEDD, BOVW},
    L1: {ACC, PHOG, BOVW},
}

# default metric per model, used by index search
METRIC_FOR_MODEL = {CEDD: TANIMOTO, ACC: L1, PHOG: L1, BOVW: TANIMOTO}


def tanimoto_distance(a: np.ndarray, b: np.ndarray) -> float:
    """1 - a.b / (|a|^2 + |b|^2 - a.b); 0 when both vectors are all-zero."""
    af = np.asarray(a, dtype=np.float64)
    bf = np.asarray(b, dtype=np.float64)
    dot = float(af @ bf)
    denom = float(af @ af) + float(bf @ bf) - dot
    if denom == 0.0:
        return 0.0
    return 1.0 - dot / denom


def l1_distance(a: np.ndarray, b: np.ndarray) -> float:
    af = np.asarray(a, dtype=np.float64)
    bf = np.asarray(b, dtype=np.float64)
    return float(np.abs(af - bf).sum())


def descriptor_distance(a: Descriptor, b: Descriptor, metric: str) -> float:
    if a.model != b.model:
        raise ModelMismatch(f"cannot compare {a.model} with {b.model}")
    if metric not in _ALLOWED:
        raise MetricMismatch(f"unknown metric {metric!r}")
    if a.model not in _ALLOWED[metric]:
        raise MetricMismatch(f"metric {metric!r} not valid for model {a.model}")
    if metric == TANIMOTO:
        return tanimoto_distance(a.values, b.values)
    return l1_distance(a.values, b.values)


def similarity_from_distance(d: float) -> float:
    """Monotone map of distance onto (0, 1]: 1 / (1 + d)."""
    if d < 0:
        raise NegativeDistance(f"distance must be non-negative, got {d}")
    return 1.0 / (1.0 + d)
