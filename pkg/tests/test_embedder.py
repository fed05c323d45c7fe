import numpy as np
import pytest

from tierkite.dense.embedder import EmbedderSpec, embed, embed_batch


def test_embedding_is_deterministic():
    spec = EmbedderSpec(dimension=256, seed=42)
    a = embed("some query text", spec)
    b = embed("some query text", spec)
    assert np.array_equal(a, b)


def test_embedding_is_unit_norm():
    spec = EmbedderSpec(dimension=768, seed=42)
    for text in ("cat", "cat sat on the mat", "x " * 300):
        assert abs(np.linalg.norm(embed(text, spec)) - 1.0) <= 1e-4


def test_shared_tokens_raise_cosine():
    spec = EmbedderSpec(dimension=768, seed=42)
    q = embed("cat sat", spec)
    near = embed("cat sat mat", spec)
    far = embed("xyzzy quux", spec)
    assert float(q @ near) > float(q @ far)


def test_different_seeds_differ():
    a = embed("hello world", EmbedderSpec(dimension=128, seed=1))
    b = embed("hello world", EmbedderSpec(dimension=128, seed=2))
    assert not np.allclose(a, b)


def test_batch_matches_single():
    spec = EmbedderSpec(dimension=128, seed=7)
    texts = ["first text", "second text body", "third"]
    batch = embed_batch(texts, spec)
    for i, t in enumerate(texts):
        assert np.allclose(batch[i], embed(t, spec), atol=1e-6)


def test_empty_text_rejected():
    with pytest.raises(ValueError):
        embed("", EmbedderSpec())


def test_tokenless_text_still_embeds():
    v = embed("!!! ... ???", EmbedderSpec(dimension=64, seed=3))
    assert abs(np.linalg.norm(v) - 1.0) <= 1e-4


def test_dimension_respected():
    for d in (64, 128, 768):
        assert embed("abc def", EmbedderSpec(dimension=d)).shape == (d,)
