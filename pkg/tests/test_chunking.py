import pytest
from hypothesis import given, settings, strategies as st

from tierkite.errors import EmptyDocument, InvalidConfig
from tierkite.text.chunking import chunk_document, window_starts
from tierkite.text.parsing import Document


def doc_of(n_tokens: int) -> Document:
    return Document("d", "x", "plain_text", " ".join(f"t{i}" for i in range(n_tokens)), "en")


def test_single_window_when_it_fits():
    chunks = chunk_document(doc_of(512), 512, 64)
    assert len(chunks) == 1
    assert chunks[0].token_span == (0, 512)
    assert chunks[0].token_count == 512


def test_stride_arithmetic_1024_tokens():
    # stride = 512 - 64 = 448: windows start at 0, 448, 896
    chunks = chunk_document(doc_of(1024), 512, 64)
    assert [c.token_span[0] for c in chunks] == [0, 448, 896]
    assert len(chunks) == 3
    assert chunks[-1].token_span == (896, 1024)


def test_empty_document_rejected():
    with pytest.raises(EmptyDocument):
        chunk_document(Document("d", "x", "plain_text", "...", "en"), 512, 64)


def test_overlap_must_be_smaller_than_chunk():
    with pytest.raises(InvalidConfig):
        chunk_document(doc_of(10), 64, 64)
    with pytest.raises(InvalidConfig):
        window_starts(10, 64, 65)


def test_chunk_id_is_pure_function():
    a = chunk_document(doc_of(700), 512, 64)
    b = chunk_document(doc_of(700), 512, 64)
    assert [c.chunk_id for c in a] == [c.chunk_id for c in b]


def test_chunk_text_matches_span():
    doc = doc_of(1000)
    tokens = doc.raw_text.split()
    for chunk in chunk_document(doc, 512, 64):
        s, e = chunk.token_span
        assert chunk.text.split() == tokens[s:e]


@settings(max_examples=200, deadline=None)
@given(
    n_tokens=st.integers(min_value=1, max_value=3000),
    chunk_size=st.integers(min_value=2, max_value=600),
    overlap_frac=st.floats(min_value=0.0, max_value=0.95),
)
def test_every_token_covered_and_overlap_exact(n_tokens, chunk_size, overlap_frac):
    overlap = int(chunk_size * overlap_frac)
    starts = window_starts(n_tokens, chunk_size, overlap)
    windows = [(s, min(s + chunk_size, n_tokens)) for s in starts]
    covered = set()
    for s, e in windows:
        covered.update(range(s, e))
    assert covered == set(range(n_tokens))
    # the leading window of each consecutive pair is always full size, so
    # the pair overlaps by exactly `overlap` tokens
    for (s1, e1), (s2, _e2) in zip(windows, windows[1:]):
        assert e1 - s2 == overlap
