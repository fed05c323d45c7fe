import random

import numpy as np
import pytest

from tierkite.engine.bench import warm_kernels
from tierkite.engine.config import detect_profile
from tierkite.engine.engine import Engine
from tierkite.text.chunking import Chunk, chunk_id_for


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # jit-compile every kernel once so timings inside tests are steady
    warm_kernels()


def make_chunk(i: int, text: str, lang: str = "en") -> Chunk:
    n = len(text.split())
    return Chunk(
        chunk_id=chunk_id_for(f"d{i}", (0, n), text),
        doc_id=f"d{i}",
        token_span=(0, n),
        text=text,
        token_count=n,
        language=lang,
    )


def write_corpus(path, n_docs: int = 10, tokens_per_doc: int = 2000, vocab: int = 2500, seed: int = 0):
    rng = random.Random(seed)
    words = [f"tok{i}" for i in range(vocab)]
    path.mkdir(parents=True, exist_ok=True)
    for i in range(n_docs):
        text = " ".join(rng.choice(words) for _ in range(tokens_per_doc))
        (path / f"doc{i:03d}.txt").write_text(text)
    return path


@pytest.fixture(scope="module")
def small_engine(tmp_path_factory):
    """A loaded engine over a ~20-doc synthetic corpus (module-scoped)."""
    base = tmp_path_factory.mktemp("small-engine")
    corpus = write_corpus(base / "corpus", n_docs=20, tokens_per_doc=2200, seed=7)
    (corpus / "marker.txt").write_text(
        "the unique zanzibar keyword lives here with ordinary tokens "
        + " ".join(f"tok{i}" for i in range(120))
    )
    cfg = detect_profile(
        total_ram_bytes=8 * 2**30,
        physical_cores=2,
        engine_dir=base / "engine",
        dimension=128,
        nlist=8,
        train_sample=20000,
        hot_max_vectors=2000,
        hot_ef_construction=64,
        migration_batch=100,
    )
    engine = Engine(cfg)
    engine.ingest(corpus)
    engine.build_indexes()
    engine.load()
    return engine


@pytest.fixture()
def rng():
    return np.random.default_rng(42)
