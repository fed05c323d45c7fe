"""MinHash signatures over token shingles.

The permutation family is a*h + b (mod 2^64) with odd a, which is a
bijection of the hash space, so the positional match rate of two
signatures estimates the Jaccard similarity of the underlying shingle
sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from tierkite import kernels
from tierkite.errors import InvalidConfig
from tierkite.text.chunking import Chunk
from tierkite.text.tokenizer import token_hash_array

DEFAULT_PERMUTATIONS = 128
DEFAULT_SHINGLE_WIDTH = 5
PERMUTATION_SEED = 42
MIN_PERMUTATIONS = 16


@dataclass
class MinHashSignature:
    hashes: np.ndarray  # uint64, length num_permutations
    shingle_width: int

    def estimate_jaccard(self, other: "MinHashSignature") -> float:
        if len(self.hashes) != len(other.hashes):
            raise InvalidConfig("signatures have different permutation counts")
        return float(np.mean(self.hashes == other.hashes))


@lru_cache(maxsize=8)
def permutations(num_permutations: int, seed: int = PERMUTATION_SEED) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.Generator(np.random.PCG64(seed))
    a = rng.integers(1, 2**63, num_permutations, dtype=np.uint64)
    a = (a << np.uint64(1)) | np.uint64(1)  # odd multiplier keeps the map bijective
    b = rng.integers(0, 2**63, num_permutations, dtype=np.uint64)
    return a, b


def signature_from_token_hashes(
    token_hashes: np.ndarray,
    num_permutations: int = DEFAULT_PERMUTATIONS,
    shingle_width: int = DEFAULT_SHINGLE_WIDTH,
) -> MinHashSignature:
    a, b = permutations(num_permutations)
    shingles = kernels.shingle_hashes(token_hashes, shingle_width)
    return MinHashSignature(hashes=kernels.minhash(shingles, a, b), shingle_width=shingle_width)


def minhash_signature(
    chunk: Chunk,
    num_permutations: int = DEFAULT_PERMUTATIONS,
    shingle_width: int = DEFAULT_SHINGLE_WIDTH,
) -> MinHashSignature:
    if not chunk.text:
        raise InvalidConfig("minhash_signature requires non-empty chunk text")
    if num_permutations < MIN_PERMUTATIONS:
        raise InvalidConfig(f"num_permutations must be >= {MIN_PERMUTATIONS}")
    return signature_from_token_hashes(token_hash_array(chunk.text), num_permutations, shingle_width)
