"""Engine configuration and hardware profile detection.

Hosts with at most 16 GB of RAM or at most 6 physical cores run the
laptop profile: reranking stub, enrichment, and summary prefiltering stay
off, thread counts derive from physical cores, and the memory ceiling
defaults to 15.5 GB. TIERKITE_PROFILE=laptop|full overrides detection and
an explicit config value overrides both.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import psutil

from tierkite.errors import InvalidConfig

LAPTOP_RAM_BYTES = 16 * 1024**3
LAPTOP_MAX_CORES = 6
LAPTOP_CEILING_BYTES = int(15.5 * 1024**3)
ENV_CONFIG = "TIERKITE_CONFIG"
ENV_PROFILE = "TIERKITE_PROFILE"


@dataclass
class EngineConfig:
    engine_dir: Path = Path("engine")
    laptop_mode: bool = True
    memory_ceiling_bytes: int = LAPTOP_CEILING_BYTES
    idle_unload_seconds: int = 300
    worker_count: int = 1

    dimension: int = 768
    embedder_seed: int = 42

    chunk_size: int = 512
    overlap: int = 64

    pq_m: int = 8
    pq_nbits: int = 8
    nlist: int = 1000
    nprobe: int = 10
    train_sample: int = 100_000

    hot_max_vectors: int = 500_000
    hot_m: int = 16
    hot_ef_construction: int = 200
    hot_ef_search: int = 40
    migration_batch: int = 100_000

    rrf_k: int = 60
    alpha: float = 0.5
    alpha_mode: str = "fixed"  # fixed | adaptive
    qar_beta: float = 0.2
    qar_mode: str = "dampen"

    cache_capacity: int = 500
    cache_threshold: float = 0.92

    reranking_stub: bool = False
    llm_enrichment: bool = False
    summary_prefilter: bool = False

    batch_size: int = 50

    def __post_init__(self) -> None:
        if self.memory_ceiling_bytes <= 0:
            raise InvalidConfig("memory ceiling must be positive")
        self.engine_dir = Path(self.engine_dir)

    # engine directory layout
    @property
    def store_path(self) -> Path:
        return self.engine_dir / "store.tkcs"

    @property
    def sparse_path(self) -> Path:
        return self.engine_dir / "sparse.tksp"

    @property
    def cold_path(self) -> Path:
        return self.engine_dir / "cold.tkpq"

    @property
    def hot_path(self) -> Path:
        return self.engine_dir / "hot.tkhg"

    @property
    def calibration_path(self) -> Path:
        return self.engine_dir / "calibration.json"

    @property
    def journal_path(self) -> Path:
        return self.engine_dir / "journal.ndjson"

    def to_json(self) -> str:
        data = dataclasses.asdict(self)
        data["engine_dir"] = str(self.engine_dir)
        return json.dumps(data, indent=2)


def detect_profile(
    total_ram_bytes: int | None = None,
    physical_cores: int | None = None,
    env: dict | None = None,
    **overrides,
) -> EngineConfig:
    """Build a config from detected (or injected) hardware.

    Precedence: explicit overrides > TIERKITE_PROFILE > detection.
    """
    env = os.environ if env is None else env
    ram = total_ram_bytes if total_ram_bytes is not None else psutil.virtual_memory().total
    cores = physical_cores if physical_cores is not None else (psutil.cpu_count(logical=False) or 1)

    laptop = ram <= LAPTOP_RAM_BYTES or cores <= LAPTOP_MAX_CORES
    profile_env = env.get(ENV_PROFILE, "").strip().lower()
    if profile_env == "laptop":
        laptop = True
    elif profile_env == "full":
        laptop = False

    defaults = dict(
        laptop_mode=laptop,
        worker_count=max(1, cores - 1),
        memory_ceiling_bytes=LAPTOP_CEILING_BYTES if laptop else ram,
        reranking_stub=False,
        llm_enrichment=False,
        summary_prefilter=False,
    )
    if not laptop:
        defaults["reranking_stub"] = True
    defaults.update(overrides)
    return EngineConfig(**defaults)


def load_config(path: Path | None = None, env: dict | None = None, **overrides) -> EngineConfig:
    """Detect a profile, then apply a JSON config file and overrides."""
    env = os.environ if env is None else env
    file_values: dict = {}
    config_path = path or env.get(ENV_CONFIG)
    if config_path:
        file_values = json.loads(Path(config_path).read_text())
    merged = {**file_values, **overrides}
    return detect_profile(env=env, **merged)
