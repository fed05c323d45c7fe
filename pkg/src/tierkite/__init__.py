"""tierkite: hybrid sparse + quantized-dense retrieval for memory-bounded hosts.

The package is organised around a streaming ingestion pipeline feeding three
retrieval channels (BM25 inverted index, in-memory HNSW hot tier, memory-mapped
IVFPQ cold tier) whose rankings are fused with reciprocal rank fusion and
corrected for quantization loss.
"""

__version__ = "0.1.0"

from tierkite import errors

__all__ = ["errors", "__version__"]
