"""Ranking quality metrics over relevance judgments."""

from __future__ import annotations

from typing import Collection, Sequence


def average_precision(ranked: Sequence[str], relevant: Collection[str]) -> float:
    """Mean of precision@r over the ranks of retrieved relevant documents,
    divided by the total number of relevant documents; 0 when none exist.
    """
    total = len(set(relevant))
    if total == 0:
        return 0.0
    hits = 0
    acc = 0.0
    for rank, doc_id in enumerate(ranked, start=1):
        if doc_id in relevant:
            hits += 1
            acc += hits / rank
    return acc / total


def precision_at(ranked: Sequence[str], relevant: Collection[str], k: int) -> float:
    if k <= 0:
        return 0.0
    hits = sum(1 for doc_id in ranked[:k] if doc_id in relevant)
    return hits / k


def recall_at(ranked: Sequence[str], relevant: Collection[str], k: int) -> float:
    total = len(set(relevant))
    if total == 0 or k <= 0:
        return 0.0
    hits = sum(1 for doc_id in ranked[:k] if doc_id in relevant)
    return hits / total
