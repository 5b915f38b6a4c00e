"""Tokenization, index construction and per-document term weights.

Every retrieval model reads its statistics from one immutable
:class:`CorpusIndex`: raw and normalized term frequencies, document
frequencies, idf values and the two weight schemes built on tf-idf
(sum-normalized for the probabilistic document layer, max-normalized
for the possibilistic one).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from netret.errors import DuplicateDocId, EmptyCorpus, UnknownDoc

# Unicode alphanumeric runs; underscore counts as a separator.
_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class Document:
    """A raw corpus entry. ``id`` must be nonempty and unique."""

    id: str
    text: str


@dataclass(frozen=True)
class IndexOptions:
    """Indexing knobs shared by index construction and query parsing.

    ``clamp`` is the probability epsilon applied to estimated CPT rows.
    ``weight_exponent`` is reserved and currently unused.
    """

    stopwords: frozenset[str] = frozenset()
    min_token_len: int = 2
    clamp: float = 1e-4
    weight_exponent: float | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.clamp < 0.5:
            raise ValueError(f"clamp must lie in [0, 0.5), got {self.clamp}")
        if self.min_token_len < 1:
            raise ValueError("min_token_len must be >= 1")


def tokenize(text: str, opts: IndexOptions = IndexOptions()) -> list[str]:
    """Lowercase, split on non-alphanumerics, drop short tokens and stopwords."""
    return [
        tok
        for tok in _TOKEN.findall(text.lower())
        if len(tok) >= opts.min_token_len and tok not in opts.stopwords
    ]


class CorpusIndex:
    """Immutable term and document statistics.

    Term ids are dense integers assigned by first appearance in corpus
    order, which makes rebuilding from identical inputs deterministic.
    Documents that produced no tokens stay in the corpus count ``n_docs``
    but are excluded from ``rankable_doc_ids``.
    """

    def __init__(
        self,
        doc_entries: Sequence[tuple[str, Mapping[int, int]]],
        terms: Sequence[str],
        options: IndexOptions = IndexOptions(),
    ) -> None:
        self.options = options
        self.terms: tuple[str, ...] = tuple(terms)
        self.term_ids: dict[str, int] = {t: i for i, t in enumerate(self.terms)}
        if len(self.term_ids) != len(self.terms):
            raise ValueError("duplicate term strings")

        self.doc_ids: tuple[str, ...] = tuple(doc_id for doc_id, _ in doc_entries)
        self.doc_tf: dict[str, dict[int, int]] = {
            doc_id: dict(tf) for doc_id, tf in doc_entries
        }
        if len(self.doc_tf) != len(self.doc_ids):
            raise DuplicateDocId("duplicate document ids in index input")

        n = len(self.doc_ids)
        m = len(self.terms)
        self.n_docs = n
        self.vocab_size = m

        postings: list[list[tuple[str, int]]] = [[] for _ in range(m)]
        for doc_id in self.doc_ids:
            for tid, tf in self.doc_tf[doc_id].items():
                if not 0 <= tid < m:
                    raise ValueError(f"term id {tid} out of range")
                if tf < 1:
                    raise ValueError("term frequencies must be >= 1")
                postings[tid].append((doc_id, tf))
        self.postings: tuple[tuple[tuple[str, int], ...], ...] = tuple(
            tuple(p) for p in postings
        )

        self.df: tuple[int, ...] = tuple(len(p) for p in self.postings)
        if any(df == 0 for df in self.df):
            raise ValueError("every term must occur in at least one document")
        self.idf: tuple[float, ...] = tuple(math.log(n / df) for df in self.df)
        log_n = math.log(n) if n > 1 else 0.0
        self.nidf: tuple[float, ...] = tuple(
            (idf / log_n) if n > 1 else 0.0 for idf in self.idf
        )

        self.ntf: dict[str, dict[int, float]] = {}
        for doc_id in self.doc_ids:
            tf = self.doc_tf[doc_id]
            if tf:
                peak = max(tf.values())
                self.ntf[doc_id] = {tid: c / peak for tid, c in tf.items()}
            else:
                self.ntf[doc_id] = {}

        self.rankable_doc_ids: tuple[str, ...] = tuple(
            d for d in self.doc_ids if self.doc_tf[d]
        )
        self._doc_term_sets: dict[str, frozenset[int]] = {
            d: frozenset(self.doc_tf[d]) for d in self.doc_ids
        }
        self._term_doc_sets: tuple[frozenset[str], ...] = tuple(
            frozenset(doc_id for doc_id, _ in p) for p in self.postings
        )

    # -- lookups -------------------------------------------------------

    def doc_terms(self, doc_id: str) -> frozenset[int]:
        try:
            return self._doc_term_sets[doc_id]
        except KeyError:
            raise UnknownDoc(doc_id) from None

    def docs_with_term(self, tid: int) -> frozenset[str]:
        return self._term_doc_sets[tid]

    def cooccurrence(self, i: int, k: int) -> int:
        """Number of documents containing both terms."""
        return len(self._term_doc_sets[i] & self._term_doc_sets[k])

    def count_pattern(self, constraints: Mapping[int, bool]) -> int:
        """Count documents whose presence pattern satisfies a conjunction.

        ``constraints`` maps term id to required presence (True) or
        absence (False); documents with no tokens satisfy all-absence.
        """
        count = 0
        for term_set in self._doc_term_sets.values():
            if all((tid in term_set) == want for tid, want in constraints.items()):
                count += 1
        return count

    def lookup_terms(self, terms: Iterable[str]) -> tuple[list[int], int]:
        """Map term strings to ids, deduplicated in order; returns (ids, dropped)."""
        ids: list[int] = []
        seen: set[int] = set()
        dropped = 0
        for t in terms:
            tid = self.term_ids.get(t)
            if tid is None:
                dropped += 1
            elif tid not in seen:
                seen.add(tid)
                ids.append(tid)
        return ids, dropped

    # -- serialization -------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "options": {
                "stopwords": sorted(self.options.stopwords),
                "min_token_len": self.options.min_token_len,
                "clamp": self.options.clamp,
            },
            "terms": list(self.terms),
            "docs": [
                {"id": d, "tf": {str(t): c for t, c in self.doc_tf[d].items()}}
                for d in self.doc_ids
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CorpusIndex":
        opts = IndexOptions(
            stopwords=frozenset(data["options"]["stopwords"]),
            min_token_len=data["options"]["min_token_len"],
            clamp=data["options"]["clamp"],
        )
        entries = [
            (doc["id"], {int(t): c for t, c in doc["tf"].items()})
            for doc in data["docs"]
        ]
        return cls(entries, data["terms"], opts)


def build_index(docs: Sequence[Document], opts: IndexOptions = IndexOptions()) -> CorpusIndex:
    """Tokenize a corpus and assemble the full index.

    Raises EmptyCorpus when no document yields a token and DuplicateDocId
    on repeated ids.
    """
    terms: list[str] = []
    term_ids: dict[str, int] = {}
    entries: list[tuple[str, dict[int, int]]] = []
    seen: set[str] = set()
    for doc in docs:
        if not doc.id:
            raise ValueError("document id must be nonempty")
        if doc.id in seen:
            raise DuplicateDocId(doc.id)
        seen.add(doc.id)
        tf: dict[int, int] = {}
        for tok in tokenize(doc.text, opts):
            tid = term_ids.get(tok)
            if tid is None:
                tid = len(terms)
                term_ids[tok] = tid
                terms.append(tok)
            tf[tid] = tf.get(tid, 0) + 1
        entries.append((doc.id, tf))
    if not any(tf for _, tf in entries):
        raise EmptyCorpus("no document produced any token")
    return CorpusIndex(entries, terms, opts)


def _tfidf(index: CorpusIndex, doc_id: str) -> dict[int, float]:
    tf = index.doc_tf.get(doc_id)
    if tf is None:
        raise UnknownDoc(doc_id)
    if not tf:
        raise UnknownDoc(f"{doc_id} has no indexed terms")
    return {tid: c * index.idf[tid] for tid, c in tf.items()}


def bnr_weights(index: CorpusIndex, doc_id: str) -> dict[int, float]:
    """Sum-normalized tf-idf weights; they add up to exactly 1 per document.

    When every term of the document has idf 0 the tf-idf mass vanishes and
    the weights fall back to uniform.
    """
    tfidf = _tfidf(index, doc_id)
    total = sum(tfidf.values())
    if total == 0.0:
        u = 1.0 / len(tfidf)
        return {tid: u for tid in tfidf}
    return {tid: v / total for tid, v in tfidf.items()}


def hybrid_weights(index: CorpusIndex, doc_id: str) -> dict[int, float]:
    """Max-normalized tf-idf weights; the largest is exactly 1 per document."""
    tfidf = _tfidf(index, doc_id)
    peak = max(tfidf.values())
    if peak == 0.0:
        return {tid: 1.0 for tid in tfidf}
    return {tid: v / peak for tid, v in tfidf.items()}
