"""BM25 inverted index over stemmed tokens."""

from tierkite.sparse.index import SparseHit, SparseIndex, search_sparse
from tierkite.sparse.build import build_sparse

__all__ = ["SparseHit", "SparseIndex", "search_sparse", "build_sparse"]
