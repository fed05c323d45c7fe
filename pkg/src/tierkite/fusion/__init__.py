"""Rank fusion, quantization-aware score adjustment, semantic cache."""

from tierkite.fusion.rrf import ChannelRanking, FusedHit, fuse_rrf, fuse_rrf_weighted
from tierkite.fusion.qar import (
    CalibrationRecord,
    calibrate_qar,
    compute_adaptive_alpha,
    qar_adjust,
)
from tierkite.fusion.cache import SemanticCache

__all__ = [
    "ChannelRanking",
    "FusedHit",
    "fuse_rrf",
    "fuse_rrf_weighted",
    "CalibrationRecord",
    "calibrate_qar",
    "compute_adaptive_alpha",
    "qar_adjust",
    "SemanticCache",
]
