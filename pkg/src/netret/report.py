"""Evaluation report: per-query metrics table plus rendered figures.

The table is TSV with values fixed to four decimals; the figures land
next to the table (or wherever ``--plots`` points) as PNG files.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from netret.metrics import average_precision, precision_at, recall_at

log = logging.getLogger(__name__)


@dataclass
class QueryResult:
    qid: str
    ranked: list[str]
    relevant: set[str]
    precision: dict[int, float] = field(default_factory=dict)
    recall: dict[int, float] = field(default_factory=dict)
    ap: float = 0.0


def evaluate_run(
    run: dict[str, list[str]],
    qrels: dict[str, set[str]],
    k_values: Sequence[int],
) -> tuple[list[QueryResult], float, int]:
    """Compute per-query metrics and MAP.

    MAP averages AP over queries with at least one judged-relevant
    document; the number of excluded queries is returned alongside.
    """
    results: list[QueryResult] = []
    for qid in sorted(run):
        res = QueryResult(qid=qid, ranked=run[qid], relevant=qrels.get(qid, set()))
        for k in k_values:
            res.precision[k] = precision_at(res.ranked, res.relevant, k)
            res.recall[k] = recall_at(res.ranked, res.relevant, k)
        res.ap = average_precision(res.ranked, res.relevant)
        results.append(res)
    judged = [r for r in results if r.relevant]
    excluded = len(results) - len(judged)
    if excluded:
        log.warning("%d quer(ies) without judged-relevant documents excluded from MAP", excluded)
    mean_ap = sum(r.ap for r in judged) / len(judged) if judged else 0.0
    return results, mean_ap, excluded


def metrics_table(
    results: Sequence[QueryResult], mean_ap: float, k_values: Sequence[int]
) -> str:
    """Deterministic TSV: one row per query, then the aggregate row."""
    header = ["qid"]
    for k in k_values:
        header += [f"p@{k}", f"r@{k}"]
    header.append("ap")
    lines = ["\t".join(header)]
    for res in results:
        row = [res.qid]
        for k in k_values:
            row += [f"{res.precision[k]:.4f}", f"{res.recall[k]:.4f}"]
        row.append(f"{res.ap:.4f}")
        lines.append("\t".join(row))
    judged = [r for r in results if r.relevant]
    agg = ["ALL"]
    for k in k_values:
        mp = sum(r.precision[k] for r in judged) / len(judged) if judged else 0.0
        mr = sum(r.recall[k] for r in judged) / len(judged) if judged else 0.0
        agg += [f"{mp:.4f}", f"{mr:.4f}"]
    agg.append(f"{mean_ap:.4f}")
    lines.append("\t".join(agg))
    return "\n".join(lines) + "\n"


def render_figures(
    results: Sequence[QueryResult],
    mean_ap: float,
    k_values: Sequence[int],
    out_dir: Path,
    stem: str = "metrics",
) -> list[Path]:
    """Write the AP bar chart and the mean precision/recall curves."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    qids = [r.qid for r in results]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.5 * len(qids) + 2.0), 3.2))
    ax.bar(range(len(qids)), [r.ap for r in results], color="#4878a8")
    ax.axhline(mean_ap, color="#b04030", linestyle="--", linewidth=1.0,
               label=f"MAP = {mean_ap:.4f}")
    ax.set_xticks(range(len(qids)))
    ax.set_xticklabels(qids, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("average precision")
    ax.set_ylim(0.0, 1.05)
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    path = out_dir / f"{stem}_ap.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    judged = [r for r in results if r.relevant]
    ks = list(k_values)
    mean_p = [
        sum(r.precision[k] for r in judged) / len(judged) if judged else 0.0
        for k in ks
    ]
    mean_r = [
        sum(r.recall[k] for r in judged) / len(judged) if judged else 0.0
        for k in ks
    ]
    fig, ax = plt.subplots(figsize=(4.2, 3.2))
    ax.plot(ks, mean_p, marker="o", label="mean P@k", color="#4878a8")
    ax.plot(ks, mean_r, marker="s", label="mean R@k", color="#58a868")
    ax.set_xlabel("k")
    ax.set_ylabel("score")
    ax.set_xticks(ks)
    ax.set_ylim(0.0, 1.05)
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = out_dir / f"{stem}_pk.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)
    return written
