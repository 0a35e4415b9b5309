"""k-means visual vocabulary: k-means++ seeding, Lloyd iterations to an
assignment fixpoint, empty clusters re-seeded from the largest cluster."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import NotEnoughSamples

DEFAULT_K = 512
DEFAULT_MAX_ITER = 50


@dataclass(frozen=True)
class Vocabulary:
    centroids: np.ndarray = field(repr=False)  # (k, dim) float64
    seed: int = 0
    iterations_run: int = 0
    wcss_history: tuple[float, ...] = ()

    @property
    def k(self) -> int:
        return self.centroids.shape[0]


def _as_matrix(samples) -> np.ndarray:
    rows = [np.asarray(getattr(s, "values", s), dtype=np.float64) for s in samples]
    return np.stack(rows)


def _sq_dists(x: np.ndarray, c: np.ndarray) -> np.ndarray:
    """(n, k) squared euclidean distances, clipped at 0 against float error."""
    d2 = (
        (x * x).sum(axis=1)[:, None]
        - 2.0 * (x @ c.T)
        + (c * c).sum(axis=1)[None, :]
    )
    return np.maximum(d2, 0.0)


def _kmeanspp_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centroids = np.empty((k, x.shape[1]))
    first = int(rng.integers(n))
    centroids[0] = x[first]
    d2 = ((x - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            idx = int(rng.integers(n))
        centroids[j] = x[idx]
        d2 = np.minimum(d2, ((x - centroids[j]) ** 2).sum(axis=1))
    return centroids


def train_vocabulary(samples, k: int = DEFAULT_K, seed: int = 0,
                     max_iter: int = DEFAULT_MAX_ITER) -> Vocabulary:
    """Deterministic per (samples, k, seed, max_iter); WCSS non-increasing."""
    if k < 1:
        raise ValueError("k must be >= 1")
    x = _as_matrix(samples)
    n = x.shape[0]
    if n < k:
        raise NotEnoughSamples(f"need at least {k} samples, got {n}")

    rng = np.random.default_rng(seed)
    centroids = _kmeanspp_init(x, k, rng)

    assign = np.full(n, -1, dtype=np.int64)
    wcss_history: list[float] = []
    iterations = 0
    for _ in range(max_iter):
        d2 = _sq_dists(x, centroids)
        new_assign = d2.argmin(axis=1)
        wcss_history.append(float(d2[np.arange(n), new_assign].sum()))
        iterations += 1
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign

        counts = np.bincount(assign, minlength=k)
        sums = np.zeros_like(centroids)
        np.add.at(sums, assign, x)
        nonempty = counts > 0
        centroids[nonempty] = sums[nonempty] / counts[nonempty, None]

        # re-seed empty clusters from the farthest point of the largest cluster
        for j in np.nonzero(~nonempty)[0]:
            donor = int(np.argmax(counts))
            members = np.nonzero(assign == donor)[0]
            far = members[np.argmax(((x[members] - centroids[donor]) ** 2).sum(axis=1))]
            centroids[j] = x[far]
            assign[far] = j
            counts[donor] -= 1
            counts[j] += 1

    return Vocabulary(
        centroids=centroids,
        seed=seed,
        iterations_run=iterations,
        wcss_history=tuple(wcss_history),
    )
