"""Seeded Lloyd k-means with k-means++-style seeding.

Deterministic for fixed inputs: fixed generator, fixed iteration cap,
empty clusters re-seeded from the point farthest from its centroid.
"""

from __future__ import annotations

import numpy as np

from tierkite.errors import TrainError

MAX_ITERS = 25
_SEED_SUBSAMPLE_FACTOR = 20


def assign(X: np.ndarray, centroids: np.ndarray, block: int = 65536) -> np.ndarray:
    """Nearest centroid per row by squared euclidean distance."""
    c_norms = (centroids.astype(np.float32) ** 2).sum(axis=1)
    labels = np.empty(len(X), dtype=np.int64)
    for lo in range(0, len(X), block):
        hi = min(lo + block, len(X))
        scores = X[lo:hi] @ centroids.T
        labels[lo:hi] = np.argmin(c_norms[None, :] - 2.0 * scores, axis=1)
    return labels


def _plus_plus_seed(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(X)
    pool = X
    if n > _SEED_SUBSAMPLE_FACTOR * k:
        idx = rng.choice(n, _SEED_SUBSAMPLE_FACTOR * k, replace=False)
        pool = X[np.sort(idx)]
    centers = np.empty((k, X.shape[1]), dtype=np.float32)
    first = int(rng.integers(len(pool)))
    centers[0] = pool[first]
    d2 = ((pool - centers[0]) ** 2).sum(axis=1)
    for i in range(1, k):
        total = float(d2.sum())
        if total <= 0:
            centers[i] = pool[int(rng.integers(len(pool)))]
        else:
            target = rng.random() * total
            j = int(np.searchsorted(np.cumsum(d2), target))
            j = min(j, len(pool) - 1)
            centers[i] = pool[j]
        d2 = np.minimum(d2, ((pool - centers[i]) ** 2).sum(axis=1))
    return centers


def kmeans(X: np.ndarray, k: int, seed: int, iters: int = MAX_ITERS) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=np.float32)
    n = len(X)
    if n < k:
        raise TrainError(f"need at least {k} samples, got {n}")
    rng = np.random.Generator(np.random.PCG64(seed))
    centroids = _plus_plus_seed(X, k, rng)
    for _ in range(iters):
        labels = assign(X, centroids)
        moved = False
        for c in range(k):
            members = labels == c
            count = int(members.sum())
            if count == 0:
                # re-seed from the globally worst-fit point
                dist = ((X - centroids[labels]) ** 2).sum(axis=1)
                far = int(np.argmax(dist))
                centroids[c] = X[far]
                labels[far] = c
                moved = True
                continue
            new_c = X[members].mean(axis=0, dtype=np.float64).astype(np.float32)
            if not np.array_equal(new_c, centroids[c]):
                centroids[c] = new_c
                moved = True
        if not moved:
            break
    return centroids
