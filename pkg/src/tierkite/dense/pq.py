"""Product quantization: per-subspace codebooks, packed codes.

A d-dim vector splits into m subvectors; each maps to its nearest of
2^nbits subspace centroids. Code size is exactly m*nbits/8 bytes
(768-dim float32 at m=8, nbits=8 compresses 3072 bytes to 8: 384x).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from tierkite.dense.kmeans import assign, kmeans
from tierkite.errors import ShapeError, TrainError

SUPPORTED_NBITS = (4, 8)


@dataclass
class PQCodebook:
    m: int
    nbits: int
    centroids: np.ndarray  # (m, 2**nbits, d/m) float32
    trained_on: int

    @property
    def dimension(self) -> int:
        return self.m * self.centroids.shape[2]

    @property
    def code_size(self) -> int:
        return self.m * self.nbits // 8


def train_quantizer(
    sample: np.ndarray, m: int = 8, nbits: int = 8, nlist: int = 1000, seed: int = 42
) -> tuple[PQCodebook, np.ndarray]:
    """Train subspace codebooks and coarse partition centroids."""
    sample = np.ascontiguousarray(sample, dtype=np.float32)
    if sample.ndim != 2:
        raise ShapeError("sample must be (n, d)")
    n, d = sample.shape
    k = 1 << nbits
    if nbits not in SUPPORTED_NBITS:
        raise TrainError(f"nbits must be one of {SUPPORTED_NBITS}")
    if d % m != 0:
        raise ShapeError(f"dimension {d} not divisible by m={m}")
    if (m * nbits) % 8 != 0:
        raise TrainError("m*nbits must be a whole number of bytes")
    if n < max(k, nlist):
        raise TrainError(f"sample of {n} vectors < max(2^nbits={k}, nlist={nlist})")

    dsub = d // m
    centroids = np.empty((m, k, dsub), dtype=np.float32)
    for j in range(m):
        centroids[j] = kmeans(sample[:, j * dsub : (j + 1) * dsub], k, seed=seed + j)
    coarse = kmeans(sample, nlist, seed=seed + 1009)
    return PQCodebook(m=m, nbits=nbits, centroids=centroids, trained_on=n), coarse


def _ids_for(vectors: np.ndarray, codebook: PQCodebook) -> np.ndarray:
    n, d = vectors.shape
    if d != codebook.dimension:
        raise ShapeError(f"vector dim {d} != codebook dim {codebook.dimension}")
    m = codebook.m
    dsub = d // m
    ids = np.empty((n, m), dtype=np.uint8)
    for j in range(m):
        ids[:, j] = assign(
            np.ascontiguousarray(vectors[:, j * dsub : (j + 1) * dsub], dtype=np.float32),
            codebook.centroids[j],
        ).astype(np.uint8)
    return ids


def pack_ids(ids: np.ndarray, nbits: int) -> np.ndarray:
    if nbits == 8:
        return np.ascontiguousarray(ids, dtype=np.uint8)
    # nbits == 4: low nibble first
    even = ids[:, 0::2]
    odd = ids[:, 1::2]
    return (even | (odd << 4)).astype(np.uint8)


def unpack_codes(codes: np.ndarray, m: int, nbits: int) -> np.ndarray:
    if nbits == 8:
        return codes
    out = np.empty((codes.shape[0], m), dtype=np.uint8)
    out[:, 0::2] = codes & 0x0F
    out[:, 1::2] = codes >> 4
    return out


def encode(vectors: np.ndarray, codebook: PQCodebook) -> np.ndarray:
    """(n, d) float32 -> (n, m*nbits/8) uint8 packed codes."""
    single = vectors.ndim == 1
    if single:
        vectors = vectors[None, :]
    codes = pack_ids(_ids_for(np.asarray(vectors, dtype=np.float32), codebook), codebook.nbits)
    return codes[0] if single else codes


def decode(codes: np.ndarray, codebook: PQCodebook) -> np.ndarray:
    """Reconstruct vectors from packed codes (centroid concatenation)."""
    single = codes.ndim == 1
    if single:
        codes = codes[None, :]
    ids = unpack_codes(np.asarray(codes, dtype=np.uint8), codebook.m, codebook.nbits)
    n = ids.shape[0]
    dsub = codebook.centroids.shape[2]
    out = np.empty((n, codebook.dimension), dtype=np.float32)
    for j in range(codebook.m):
        out[:, j * dsub : (j + 1) * dsub] = codebook.centroids[j][ids[:, j]]
    return out[0] if single else out
