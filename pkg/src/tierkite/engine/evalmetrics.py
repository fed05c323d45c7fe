"""Trec-style retrieval metrics and percentile helpers."""

from __future__ import annotations

import logging
import math
from pathlib import Path

logger = logging.getLogger(__name__)


def load_qrels(path: Path) -> dict[str, dict[str, int]]:
    """TSV of (query_id, doc_ref, grade) -> {query_id: {doc_ref: grade}}."""
    qrels: dict[str, dict[str, int]] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) < 3:
            parts = line.split()
        qid, doc, grade = parts[0], parts[1], int(parts[2])
        qrels.setdefault(qid, {})[doc] = grade
    return qrels


def recall_at_k(ranked: list, relevant: set, k: int) -> float:
    if not relevant:
        return 0.0
    return len(set(ranked[:k]) & relevant) / len(relevant)


def ndcg_at_k(ranked: list, grades: dict, k: int = 10) -> float:
    dcg = 0.0
    for i, doc in enumerate(ranked[:k]):
        g = grades.get(doc, 0)
        if g > 0:
            dcg += g / math.log2(i + 2)
    ideal = sorted((g for g in grades.values() if g > 0), reverse=True)[:k]
    idcg = sum(g / math.log2(i + 2) for i, g in enumerate(ideal))
    return dcg / idcg if idcg > 0 else 0.0


def mrr(ranked: list, relevant: set) -> float:
    for i, doc in enumerate(ranked):
        if doc in relevant:
            return 1.0 / (i + 1)
    return 0.0


def eval_retrieval(qrels: dict[str, dict[str, int]] | Path, run: dict[str, list]) -> dict:
    """Average Recall@5/10/20, nDCG@10, and MRR over the run's queries.

    Run queries absent from the qrels are skipped and counted.
    """
    if not isinstance(qrels, dict):
        qrels = load_qrels(qrels)
    sums = {"recall@5": 0.0, "recall@10": 0.0, "recall@20": 0.0, "ndcg@10": 0.0, "mrr": 0.0}
    evaluated = 0
    skipped = 0
    for qid, ranked in run.items():
        grades = qrels.get(qid)
        if grades is None:
            skipped += 1
            continue
        relevant = {d for d, g in grades.items() if g > 0}
        sums["recall@5"] += recall_at_k(ranked, relevant, 5)
        sums["recall@10"] += recall_at_k(ranked, relevant, 10)
        sums["recall@20"] += recall_at_k(ranked, relevant, 20)
        sums["ndcg@10"] += ndcg_at_k(ranked, grades, 10)
        sums["mrr"] += mrr(ranked, relevant)
        evaluated += 1
    if skipped:
        logger.warning("eval: %d run queries missing from qrels were skipped", skipped)
    out = {k: (v / evaluated if evaluated else 0.0) for k, v in sums.items()}
    out["queries"] = evaluated
    out["skipped"] = skipped
    return out


def percentile(values: list[float], p: float) -> float:
    """Nearest-rank percentile; p in (0, 100]."""
    if not values:
        raise ValueError("percentile of empty sample")
    ordered = sorted(values)
    rank = max(1, math.ceil(p / 100.0 * len(ordered)))
    return ordered[rank - 1]
