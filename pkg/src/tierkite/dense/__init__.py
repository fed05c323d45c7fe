"""Dense retrieval: deterministic embedder, PQ cold tier, HNSW hot tier."""

from tierkite.dense.embedder import EmbedderSpec, embed, embed_batch
from tierkite.dense.flat import FlatIndex
from tierkite.dense.pq import PQCodebook, train_quantizer, encode, decode
from tierkite.dense.ivfpq import ColdIndex, open_cold
from tierkite.dense.hnsw import HotGraph, HotGraphConfig, MigrationRequest

__all__ = [
    "EmbedderSpec", "embed", "embed_batch",
    "FlatIndex",
    "PQCodebook", "train_quantizer", "encode", "decode",
    "ColdIndex", "open_cold",
    "HotGraph", "HotGraphConfig", "MigrationRequest",
]
