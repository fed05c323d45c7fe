"""Quantization-aware score correction.

Offline: compare full-precision and quantized top-k on development
queries; the mean relative recall drop (clamped at zero per query) is the
corpus's calibrated degradation. Online: dampen the quantized dense
channel's fused contributions by (1 - beta * degradation), leaving sparse
and full-precision contributions untouched.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from tierkite.errors import CalibrationError, InvalidConfig
from tierkite.fusion.rrf import CHANNEL_DENSE_COLD, FusedHit

DEFAULT_BETA = 0.2
BETA_RANGE = (0.1, 0.5)
ADAPTIVE_BETA = 1.75
FALLBACK_ALPHA_DROP = 0.15


@dataclass
class CalibrationRecord:
    corpus_id: str
    mean_degradation: float
    per_query: list[float] = field(default_factory=list)
    beta: float = DEFAULT_BETA
    created_at: str = ""

    def __post_init__(self) -> None:
        if not 0.0 <= self.mean_degradation <= 1.0:
            raise InvalidConfig(f"mean degradation {self.mean_degradation} outside [0, 1]")
        if not BETA_RANGE[0] <= self.beta <= BETA_RANGE[1]:
            raise InvalidConfig(f"beta {self.beta} outside {BETA_RANGE}")
        if not self.created_at:
            self.created_at = datetime.now(timezone.utc).isoformat()

    def save(self, path: Path) -> None:
        Path(path).write_text(json.dumps(dataclasses.asdict(self), indent=2))

    @classmethod
    def load(cls, path: Path) -> "CalibrationRecord":
        return cls(**json.loads(Path(path).read_text()))


def calibrate_qar(
    index_fp32,
    index_q8,
    dev_queries,
    k: int = 10,
    search_k: int = 100,
    corpus_id: str = "default",
    beta: float = DEFAULT_BETA,
    relevant_sets=None,
    relative: bool = True,
) -> CalibrationRecord:
    """Measure per-query recall degradation of the quantized index.

    Without labels the fp32 top-k acts as the relevant set, so the fp32
    side scores recall 1 and the drop is the quantized side's miss rate.
    Queries whose fp32 recall is zero carry no signal and are skipped.
    """
    dev_queries = list(dev_queries)
    if not dev_queries:
        raise CalibrationError("calibration requires at least one dev query")
    drops: list[float] = []
    for qi, query in enumerate(dev_queries):
        res_fp = [doc for doc, _ in index_fp32.search(query, search_k)]
        res_q8 = [doc for doc, _ in index_q8.search(query, search_k)]
        relevant = set(relevant_sets[qi]) if relevant_sets is not None else set(res_fp[:k])
        if not relevant:
            continue
        recall_fp = len(set(res_fp[:k]) & relevant) / len(relevant)
        recall_q8 = len(set(res_q8[:k]) & relevant) / len(relevant)
        if recall_fp == 0:
            continue
        if relative:
            drops.append(max(0.0, (recall_fp - recall_q8) / recall_fp))
        else:
            drops.append(max(0.0, recall_fp - recall_q8))
    if not drops:
        raise CalibrationError("no dev query produced a usable recall signal")
    return CalibrationRecord(
        corpus_id=corpus_id,
        mean_degradation=sum(drops) / len(drops),
        per_query=drops,
        beta=beta,
    )


def qar_adjust(
    hits: list[FusedHit],
    record: CalibrationRecord | None,
    mode: str = "dampen",
) -> list[FusedHit]:
    """Apply the calibrated correction and re-sort.

    "dampen" multiplies only the quantized (dense_cold) contributions by
    (1 - beta * degradation). "boost" is the alternative uniform
    (1 + beta * degradation) rescale of whole fused scores, kept behind
    this flag for experimentation; it cannot change the ordering.
    """
    if record is None:
        return list(hits)
    if not BETA_RANGE[0] <= record.beta <= BETA_RANGE[1]:
        raise InvalidConfig(f"beta {record.beta} outside {BETA_RANGE}")
    if mode not in ("dampen", "boost"):
        raise InvalidConfig(f"unknown qar mode {mode!r}")
    out: list[FusedHit] = []
    if mode == "boost":
        factor = 1.0 + record.beta * record.mean_degradation
        for h in hits:
            out.append(
                FusedHit(
                    doc_ref=h.doc_ref, rrf_score=h.rrf_score, ranks=dict(h.ranks),
                    contributions=dict(h.contributions),
                    qar_adjusted_score=h.rrf_score * factor,
                )
            )
    else:
        factor = 1.0 - record.beta * record.mean_degradation
        for h in hits:
            contributions = dict(h.contributions)
            adjusted = 0.0
            for label, part in contributions.items():
                if label == CHANNEL_DENSE_COLD:
                    part = part * factor
                    contributions[label] = part
                adjusted += part
            out.append(
                FusedHit(
                    doc_ref=h.doc_ref, rrf_score=h.rrf_score, ranks=dict(h.ranks),
                    contributions=contributions, qar_adjusted_score=adjusted,
                )
            )
    out.sort(key=lambda h: (-h.qar_adjusted_score, -h.channel_count(), h.doc_ref))
    return out


def compute_adaptive_alpha(
    record: CalibrationRecord | None,
    alpha_base: float = 0.5,
    beta_adaptive: float = ADAPTIVE_BETA,
    quantized: bool = True,
) -> float:
    """Per-query fusion weight derived from calibrated degradation.

    No quantized index: keep the base weight. No calibration record: back
    off conservatively by 0.15. Otherwise shift by beta * degradation and
    clamp into [0, 1].
    """
    if not 0.0 <= alpha_base <= 1.0:
        raise InvalidConfig(f"alpha_base {alpha_base} outside [0, 1]")
    if not quantized:
        return alpha_base
    if record is None:
        return max(0.0, alpha_base - FALLBACK_ALPHA_DROP)
    return max(0.0, min(1.0, alpha_base - beta_adaptive * record.mean_degradation))
