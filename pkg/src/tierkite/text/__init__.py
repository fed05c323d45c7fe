"""Text pipeline: parsing, chunking, tokenization, stemming, deduplication."""

from tierkite.text.parsing import Document, parse_document, iter_documents
from tierkite.text.chunking import Chunk, chunk_document
from tierkite.text.tokenizer import TokenStream, detect_and_tokenize, word_spans
from tierkite.text.minhash import MinHashSignature, minhash_signature
from tierkite.text.dedup import DedupFilter, dedup_filter

__all__ = [
    "Document",
    "parse_document",
    "iter_documents",
    "Chunk",
    "chunk_document",
    "TokenStream",
    "detect_and_tokenize",
    "word_spans",
    "MinHashSignature",
    "minhash_signature",
    "DedupFilter",
    "dedup_filter",
]
