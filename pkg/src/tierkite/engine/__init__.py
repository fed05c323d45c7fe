"""Engine facade: profiles, resource governor, write lock, query service."""

from tierkite.engine.config import EngineConfig, detect_profile, load_config
from tierkite.engine.locks import Journal, WriteLock
from tierkite.engine.governor import ResourceLedger, governor_tick
from tierkite.engine.engine import Engine, QueryStats

__all__ = [
    "EngineConfig",
    "detect_profile",
    "load_config",
    "Journal",
    "WriteLock",
    "ResourceLedger",
    "governor_tick",
    "Engine",
    "QueryStats",
]
