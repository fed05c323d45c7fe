"""Reciprocal rank fusion over channel rankings.

Every document receives 1/(k + rank) from each ranking that contains it
(ranks are 1-indexed). The weighted variant scales the dense ranking's
terms by alpha and the sparse ranking's by 1 - alpha; at alpha = 0.5 it
reproduces the unweighted ordering exactly.

Ties break toward documents present in more channels, then by ascending
doc_ref.
"""

from __future__ import annotations

from dataclasses import dataclass, field

DEFAULT_RRF_K = 60

CHANNEL_DENSE_HOT = "dense_hot"
CHANNEL_DENSE_COLD = "dense_cold"
CHANNEL_SPARSE = "sparse"


@dataclass
class ChannelRanking:
    channel: str
    hits: list[tuple]  # (doc_ref, raw_score), best first; rank = index + 1
    # per-hit provenance when this ranking merges tiers (e.g. dense hot+cold)
    sources: list[str] | None = None

    def label(self, i: int) -> str:
        if self.sources is not None:
            return self.sources[i]
        return self.channel


@dataclass
class FusedHit:
    doc_ref: object
    rrf_score: float
    ranks: dict = field(default_factory=dict)          # channel -> 1-indexed rank
    contributions: dict = field(default_factory=dict)  # provenance label -> score part
    qar_adjusted_score: float = 0.0

    def channel_count(self) -> int:
        return len(self.ranks)


def _fuse(rankings: list[tuple[ChannelRanking, float]], k: int, cutoff: int | None) -> list[FusedHit]:
    if k < 1:
        raise ValueError("rrf k must be >= 1")
    fused: dict = {}
    for ranking, weight in rankings:
        for i, (doc_ref, _raw) in enumerate(ranking.hits):
            rank = i + 1
            part = weight / (k + rank)
            hit = fused.get(doc_ref)
            if hit is None:
                hit = FusedHit(doc_ref=doc_ref, rrf_score=0.0)
                fused[doc_ref] = hit
            hit.rrf_score += part
            hit.ranks[ranking.channel] = rank
            label = ranking.label(i)
            hit.contributions[label] = hit.contributions.get(label, 0.0) + part
    hits = list(fused.values())
    for h in hits:
        h.qar_adjusted_score = h.rrf_score
    hits.sort(key=lambda h: (-h.rrf_score, -h.channel_count(), h.doc_ref))
    return hits[:cutoff] if cutoff is not None else hits


def fuse_rrf(
    dense: ChannelRanking,
    sparse: ChannelRanking,
    k: int = DEFAULT_RRF_K,
    cutoff: int | None = None,
) -> list[FusedHit]:
    return _fuse([(dense, 1.0), (sparse, 1.0)], k, cutoff)


def fuse_rrf_weighted(
    dense: ChannelRanking,
    sparse: ChannelRanking,
    k: int = DEFAULT_RRF_K,
    alpha: float = 0.5,
    cutoff: int | None = None,
) -> list[FusedHit]:
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha {alpha} outside [0, 1]")
    return _fuse([(dense, alpha), (sparse, 1.0 - alpha)], k, cutoff)
