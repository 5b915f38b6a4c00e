"""Possibilistic propagation over the learned probabilistic topology.

The probability tables are carried into the possibilistic framework by a
ratio transform, the term layer is evaluated with (max, *) message
passing where * is the product or the minimum, and documents receive a
max-decomposable table over their max-normalized weights. The resulting
possibility score is exact for that table; the necessity score
aggregates term necessities and is a heuristic.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal, Mapping, Sequence

from netret.bnr import BnrModel, Cpt
from netret.corpus import CorpusIndex, hybrid_weights
from netret.errors import EmptyQuery, NotSinglyConnected
from netret.network import Dag, validate_polytree
from netret.pir import PossTable, ScorePair, rank_score_pairs
from netret.propagation import MAX_MIN, MAX_PRODUCT, Pair, propagate

log = logging.getLogger(__name__)

Operator = Literal["min", "product"]


@dataclass(frozen=True)
class PossPosteriors:
    """Per-term conditioned pairs plus the raw max-marginals behind them.

    ``pairs[t]`` is (Pi(t|Q), Pi(not-t|Q)) with max 1; ``raw[t]`` is the
    unnormalized pair (Pi(t and Q), Pi(not-t and Q)).
    """

    pairs: dict[int, Pair]
    raw: dict[int, Pair]

    def possibility(self, t: int) -> float:
        return self.pairs[t][0]

    def necessity(self, t: int) -> float:
        return 1.0 - self.pairs[t][1]


def prob_to_poss(row: Pair) -> Pair:
    """Ratio transform p(x) / max p: order preserving, max exactly 1."""
    peak = max(row)
    if peak <= 0.0:
        raise ValueError("cannot transform an all-zero row")
    return (row[0] / peak, row[1] / peak)


def translate_cpts(cpts: Mapping[int, Cpt]) -> dict[int, PossTable]:
    """Apply the ratio transform to every table row, priors included."""
    out: dict[int, PossTable] = {}
    for t, cpt in cpts.items():
        out[t] = PossTable(
            tuple(cpt.parents),
            {cfg: prob_to_poss(row) for cfg, row in cpt.rows.items()},
        )
    return out


@dataclass
class HybridModel:
    dag: Dag
    tables: dict[int, PossTable]


def translate_model(bnr_model: BnrModel) -> HybridModel:
    return HybridModel(bnr_model.dag, translate_cpts(bnr_model.cpts))


def _semiring(op: Operator):
    if op == "product":
        return MAX_PRODUCT
    if op == "min":
        return MAX_MIN
    raise ValueError(f"unknown operator {op!r}")


def poss_max_marginals(
    dag: Dag,
    tables: Mapping[int, PossTable],
    evidence: Mapping[int, bool],
    op: Operator = "product",
) -> dict[int, Pair]:
    """Unnormalized max-marginals Pi(T=v and evidence) for every term.

    Message passing runs per connected component; each node's pair is then
    combined with the other components' best joint values so the result
    ranges over full configurations of the whole term layer.
    """
    if not validate_polytree(dag):
        raise NotSinglyConnected("term layer is not singly connected")
    sr = _semiring(op)
    parents = dag.parents_map()
    rows = {t: tables[t].rows for t in parents}
    beliefs, component, totals = propagate(parents, rows, dict(evidence), sr)
    n_comp = len(totals)
    if n_comp <= 1:
        return beliefs
    # Fold of every component total except one, via prefix/suffix products.
    prefix = [1.0] * (n_comp + 1)
    for i, z in enumerate(totals):
        prefix[i + 1] = sr.mul(prefix[i], z)
    suffix = [1.0] * (n_comp + 1)
    for i in range(n_comp - 1, -1, -1):
        suffix[i] = sr.mul(suffix[i + 1], totals[i])
    raw: dict[int, Pair] = {}
    for t, (a, b) in beliefs.items():
        c = component[t]
        others = sr.mul(prefix[c], suffix[c + 1])
        raw[t] = (sr.mul(a, others), sr.mul(b, others))
    return raw


def _condition(pair: Pair, op: Operator) -> Pair:
    peak = max(pair)
    if peak == 0.0:
        return (0.0, 0.0)
    if op == "product":
        return (pair[0] / peak, pair[1] / peak)
    # min-conditioning: entries at the max become fully possible,
    # the others keep their value.
    return (
        1.0 if pair[0] == peak else pair[0],
        1.0 if pair[1] == peak else pair[1],
    )


def poss_propagate(
    dag: Dag,
    tables: Mapping[int, PossTable],
    evidence: Mapping[int, bool],
    op: Operator = "product",
) -> PossPosteriors:
    """Max-marginals conditioned per node into normalized pairs."""
    raw = poss_max_marginals(dag, tables, evidence, op)
    return PossPosteriors(
        pairs={t: _condition(pair, op) for t, pair in raw.items()},
        raw=raw,
    )


def hybrid_score(
    weights: Mapping[int, float],
    posteriors: PossPosteriors,
    op: Operator = "product",
) -> ScorePair:
    """Document scores from the max-decomposable table over w'.

    Pi = max_i w'_i * Pi(t_i|Q) is exact for that table; the necessity
    aggregate max_i w'_i * N(t_i|Q) is heuristic.
    """
    mul = _semiring(op).mul
    pi = 0.0
    necessity = 0.0
    for tid, w in weights.items():
        pi = max(pi, mul(w, posteriors.possibility(tid)))
        necessity = max(necessity, mul(w, posteriors.necessity(tid)))
    return ScorePair(pi, necessity)


def hybrid_retrieve(
    index: CorpusIndex,
    model: HybridModel,
    query_terms: Sequence[str],
    k: int,
    op: Operator = "product",
) -> list[tuple[str, ScorePair]]:
    """Rank documents by the hybrid score pair, necessity first."""
    ids, dropped = index.lookup_terms(query_terms)
    if dropped:
        log.warning("dropped %d query term(s) not in the vocabulary", dropped)
    if not ids:
        raise EmptyQuery("no query term is in the vocabulary")
    posteriors = poss_propagate(model.dag, model.tables, {t: True for t in ids}, op)
    scored = [
        (doc_id, hybrid_score(hybrid_weights(index, doc_id), posteriors, op))
        for doc_id in index.rankable_doc_ids
    ]
    return rank_score_pairs(scored, k)
