"""Possibilistic retrieval: per-document network fragments scored by a
possibility/necessity pair.

Each rankable document spans a small fragment (document node, its terms,
priors for the other vocabulary terms). Under the default conjunctive
query the joint possibility collapses to a single product per document
state, which keeps scoring linear in the query length.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, Sequence

from netret.corpus import CorpusIndex
from netret.errors import EmptyQuery, UnknownDoc
from netret.propagation import Pair

log = logging.getLogger(__name__)

DOC_PRIOR: Pair = (1.0, 1.0)  # total ignorance about the document


@dataclass(frozen=True)
class PossTable:
    """Conditional possibility rows; each pair is normalized to max 1."""

    parents: tuple
    rows: Mapping[tuple[bool, ...], Pair]

    def validate(self, tol: float = 0.0) -> None:
        for cfg, pair in self.rows.items():
            if abs(max(pair) - 1.0) > tol:
                raise ValueError(f"row {cfg} has max {max(pair)}, not 1")


@dataclass(frozen=True)
class ScorePair:
    """Document relevance as (possibility, necessity).

    ``defined`` is False when both joints vanished, i.e. conditioning on
    the query was undefined for this document; such documents rank last.
    """

    possibility: float
    necessity: float
    defined: bool = True


def pir_tables(index: CorpusIndex, doc_id: str) -> dict:
    """Tables of the document's fragment, keyed by node.

    The document node carries its ignorance prior; terms of the document
    carry (ntf, 1) given relevant and (1-nidf, 1) given not-relevant; every
    other vocabulary term carries the prior pair (1-nidf, 1).
    """
    if doc_id not in index.ntf or not index.ntf[doc_id]:
        raise UnknownDoc(doc_id)
    tables: dict = {
        doc_id: PossTable((), {(): DOC_PRIOR}),
    }
    in_doc = index.doc_terms(doc_id)
    for tid in range(index.vocab_size):
        open_world = 1.0 - index.nidf[tid]
        if tid in in_doc:
            tables[tid] = PossTable(
                (doc_id,),
                {
                    (True,): (index.ntf[doc_id][tid], 1.0),
                    (False,): (open_world, 1.0),
                },
            )
        else:
            tables[tid] = PossTable((), {(): (open_world, 1.0)})
    return tables


def pir_joint(
    query_terms: Sequence[int],
    doc_id: str,
    tables: Mapping,
    semantics: str = "and",
) -> tuple[float, float]:
    """Joint possibilities (Pi(Q and d), Pi(Q and not-d)).

    Under conjunctive semantics the query gate keeps only the instance
    with every query parent relevant, so the max over instances collapses
    to the product of the relevant-side entries. The disjunctive variant
    (at least one parent relevant) is computed factor by factor without
    enumerating instances.
    """
    if semantics not in ("and", "or"):
        raise ValueError(f"unknown query semantics {semantics!r}")
    prior = tables[doc_id].rows[()]
    joints = []
    for val_idx, d_val in ((0, True), (1, False)):
        factors = []
        for tid in query_terms:
            table = tables[tid]
            if table.parents:
                factors.append(table.rows[(d_val,)])
            else:
                factors.append(table.rows[()])
        if semantics == "and":
            joint = prior[val_idx]
            for rel, _ in factors:
                joint *= rel
        else:
            joint = _best_with_one_relevant(factors) * prior[val_idx]
        joints.append(joint)
    return (joints[0], joints[1])


def _best_with_one_relevant(factors: list[Pair]) -> float:
    """Max over instances with >= 1 relevant term of the factor product."""
    if not factors:
        return 0.0
    best = [max(p) for p in factors]
    if any(p[0] >= p[1] for p in factors):
        total = 1.0
        for b in best:
            total *= b
        return total
    # Every factor prefers not-relevant: flip the single cheapest one.
    n = len(factors)
    prefix = [1.0] * (n + 1)
    for i, b in enumerate(best):
        prefix[i + 1] = prefix[i] * b
    suffix = [1.0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] * best[i]
    return max(
        prefix[i] * factors[i][0] * suffix[i + 1] for i in range(n)
    )


def pir_score(joints: tuple[float, float]) -> ScorePair:
    """Condition on the query: Pi = joint_d / Pi(Q), N = 1 - Pi(not-d | Q)."""
    joint_d, joint_not = joints
    pi_q = max(joint_d, joint_not)
    if pi_q == 0.0:
        return ScorePair(0.0, 0.0, defined=False)
    pi = joint_d / pi_q
    necessity = 1.0 - joint_not / pi_q
    return ScorePair(pi, necessity)


def rank_score_pairs(
    scored: Sequence[tuple[str, ScorePair]], k: int
) -> list[tuple[str, ScorePair]]:
    """Necessity-first ordering shared by the possibilistic models.

    Documents with N > 0 come first by descending N, the rest follow by
    descending possibility; ties break on ascending document id.
    """
    ordered = sorted(
        scored,
        key=lambda e: (
            (0, -e[1].necessity, e[0])
            if e[1].necessity > 0
            else (1, -e[1].possibility, e[0])
        ),
    )
    return ordered[: max(k, 0)]


def pir_retrieve(
    index: CorpusIndex,
    query_terms: Sequence[str],
    k: int,
    semantics: str = "and",
) -> list[tuple[str, ScorePair]]:
    ids, dropped = index.lookup_terms(query_terms)
    if dropped:
        log.warning("dropped %d query term(s) not in the vocabulary", dropped)
    if not ids:
        raise EmptyQuery("no query term is in the vocabulary")
    scored = []
    for doc_id in index.rankable_doc_ids:
        tables = pir_tables(index, doc_id)
        scored.append((doc_id, pir_score(pir_joint(ids, doc_id, tables, semantics))))
    return rank_score_pairs(scored, k)
