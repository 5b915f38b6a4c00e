"""Probabilistic network retrieval: table estimation, exact propagation
on the term layer and the additive document scoring stage.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Mapping, Sequence

from netret.corpus import CorpusIndex, bnr_weights
from netret.errors import EmptyQuery, InconsistentEvidence, NotSinglyConnected
from netret.network import Dag, learn_structure, validate_polytree
from netret.propagation import SUM_PRODUCT, Pair, propagate

log = logging.getLogger(__name__)

Evidence = dict[int, bool]
Posteriors = dict[int, float]


@dataclass(frozen=True)
class Cpt:
    """Conditional probability rows for one node.

    One (p(relevant|config), p(not-relevant|config)) pair per parent
    config; root nodes hold the single empty config. Estimated rows are
    clamped into [eps, 1-eps] and always sum to 1.
    """

    parents: tuple[int, ...]
    rows: Mapping[tuple[bool, ...], Pair]

    def validate(self, tol: float = 1e-12) -> None:
        want = set(itertools.product((True, False), repeat=len(self.parents)))
        if set(self.rows) != want:
            raise ValueError("rows do not cover the parent configurations")
        for cfg, (a, b) in self.rows.items():
            if abs(a + b - 1.0) > tol:
                raise ValueError(f"row {cfg} sums to {a + b}, not 1")


def root_prior(vocab_size: int) -> Pair:
    """Marginal relevance prior of a root term: (1/M, 1 - 1/M)."""
    if vocab_size < 1:
        raise ValueError("vocabulary must be nonempty")
    p = 1.0 / vocab_size
    return (p, 1.0 - p)


def term_cpt_jaccard(
    index: CorpusIndex, node: int, parents: Sequence[int]
) -> Cpt:
    """Estimate p(node | parent config) from document co-membership counts.

    The not-relevant side comes first from the Jaccard-style ratio
    n(absent, config) / (n(absent) + n(config) - n(absent, config)), the
    relevant side by duality, and both get clamped into [eps, 1-eps].
    A zero denominator falls back to the root prior row.
    """
    if not parents:
        raise ValueError("use root_prior for parentless nodes")
    eps = index.options.clamp
    prior_rel = root_prior(index.vocab_size)[0]
    n_absent = index.n_docs - index.df[node]
    rows: dict[tuple[bool, ...], Pair] = {}
    for cfg in itertools.product((True, False), repeat=len(parents)):
        constraints = dict(zip(parents, cfg))
        n_cfg = index.count_pattern(constraints)
        constraints[node] = False
        n_joint = index.count_pattern(constraints)
        denom = n_absent + n_cfg - n_joint
        if denom == 0:
            p_rel = prior_rel
        else:
            p_rel = 1.0 - n_joint / denom
        p_rel = min(max(p_rel, eps), 1.0 - eps)
        # clamp the complement against the same constants so both entries
        # land exactly inside [eps, 1-eps]
        p_not = min(max(1.0 - p_rel, eps), 1.0 - eps)
        rows[cfg] = (p_rel, p_not)
    return Cpt(tuple(parents), rows)


def doc_prob(weights: Mapping[int, float], config: Mapping[int, bool]) -> float:
    """Additive document table: sum of the weights of relevant parents."""
    return sum(w for tid, w in weights.items() if config[tid])


def estimate_cpts(index: CorpusIndex, dag: Dag) -> dict[int, Cpt]:
    """One table per term node: priors at roots, Jaccard rows elsewhere."""
    cpts: dict[int, Cpt] = {}
    for t in dag.term_nodes:
        ps = dag.term_parents(t)
        if ps:
            cpts[t] = term_cpt_jaccard(index, t, ps)
        else:
            cpts[t] = Cpt((), {(): root_prior(index.vocab_size)})
    return cpts


@dataclass
class BnrModel:
    dag: Dag
    cpts: dict[int, Cpt]


def build_model(index: CorpusIndex, dag: Dag | None = None) -> BnrModel:
    if dag is None:
        dag = learn_structure(index)
    return BnrModel(dag, estimate_cpts(index, dag))


def pearl_propagate(dag: Dag, cpts: Mapping[int, Cpt], evidence: Mapping[int, bool]) -> Posteriors:
    """Exact posterior p(term relevant | evidence) for every term node."""
    if not validate_polytree(dag):
        raise NotSinglyConnected("term layer is not singly connected")
    parents = dag.parents_map()
    tables = {t: cpts[t].rows for t in parents}
    beliefs, _, _ = propagate(parents, tables, dict(evidence), SUM_PRODUCT, scale_messages=True)
    posteriors: Posteriors = {}
    for t, (a, b) in beliefs.items():
        s = a + b
        if s <= 0.0:
            raise InconsistentEvidence(f"evidence has probability zero at node {t}")
        posteriors[t] = a / s
    return posteriors


def bnr_score(weights: Mapping[int, float], posteriors: Mapping[int, float]) -> float:
    """Two-stage shortcut: p(doc | Q) = sum_i w_i * p(term_i | Q)."""
    return sum(w * posteriors[tid] for tid, w in weights.items())


def bnr_retrieve(
    index: CorpusIndex,
    model: BnrModel,
    query_terms: Sequence[str],
    k: int,
) -> list[tuple[str, float]]:
    """Instantiate the query terms to relevant, propagate, score and rank."""
    ids, dropped = index.lookup_terms(query_terms)
    if dropped:
        log.warning("dropped %d query term(s) not in the vocabulary", dropped)
    if not ids:
        raise EmptyQuery("no query term is in the vocabulary")
    evidence: Evidence = {tid: True for tid in ids}
    posteriors = pearl_propagate(model.dag, model.cpts, evidence)
    scored = [
        (doc_id, bnr_score(bnr_weights(index, doc_id), posteriors))
        for doc_id in index.rankable_doc_ids
    ]
    scored.sort(key=lambda e: (-e[1], e[0]))
    return scored[: max(k, 0)]
