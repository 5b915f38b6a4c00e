"""Shared corpora and random instance generators for the test suite."""

from __future__ import annotations

import itertools

import numpy as np

from netret.bnr import Cpt
from netret.corpus import Document
from netret.network import Dag
from netret.pir import PossTable


def c3_docs() -> list[Document]:
    return [
        Document("D1", "apple apple banana"),
        Document("D2", "banana cherry"),
        Document("D3", "apple cherry cherry"),
    ]


def corpus20() -> list[Document]:
    """20 documents; d00 alone holds both query terms and 'beta' is unique."""
    docs = [Document("d00", "alpha beta")]
    for i in range(1, 9):
        docs.append(Document(f"d{i:02d}", f"alpha spice{i} spice{i}"))
    texts = [
        "mud stone river",
        "stone river",
        "mud river",
        "stone mud",
        "river reed",
        "reed stone",
        "mud reed",
        "river stone mud",
        "reed mud",
        "stone reed river",
        "mud stone",
    ]
    for i, text in enumerate(texts, start=9):
        docs.append(Document(f"d{i:02d}", text))
    assert len(docs) == 20
    return docs


def random_directed_tree(rng: np.random.Generator, n: int) -> Dag:
    """Single-rooted tree: node i > 0 gets one parent among earlier nodes."""
    arcs = [(int(rng.integers(0, i)), i) for i in range(1, n)]
    return Dag(range(n), arcs)


def random_polytree(rng: np.random.Generator, n: int) -> Dag:
    """Random tree skeleton with random arc orientations (colliders allowed)."""
    arcs = []
    for i in range(1, n):
        j = int(rng.integers(0, i))
        arcs.append((j, i) if rng.random() < 0.5 else (i, j))
    return Dag(range(n), arcs)


def random_forest(rng: np.random.Generator, n: int, p_skip: float = 0.3) -> Dag:
    """Directed forest: some nodes stay roots of their own components."""
    arcs = []
    for i in range(1, n):
        if rng.random() >= p_skip:
            arcs.append((int(rng.integers(0, i)), i))
    return Dag(range(n), arcs)


def random_cpts(rng: np.random.Generator, dag: Dag, eps: float = 1e-4) -> dict[int, Cpt]:
    cpts = {}
    for t in dag.term_nodes:
        ps = dag.term_parents(t)
        rows = {}
        for cfg in itertools.product((True, False), repeat=len(ps)):
            p = eps + (1.0 - 2.0 * eps) * float(rng.random())
            rows[cfg] = (p, 1.0 - p)
        cpts[t] = Cpt(ps, rows)
    return cpts


def random_poss_tables(rng: np.random.Generator, dag: Dag) -> dict[int, PossTable]:
    """Rows normalized to max 1; the 1 lands on a random side."""
    tables = {}
    for t in dag.term_nodes:
        ps = dag.term_parents(t)
        rows = {}
        for cfg in itertools.product((True, False), repeat=len(ps)):
            other = float(rng.random())
            if rng.random() < 0.5:
                rows[cfg] = (1.0, other)
            else:
                rows[cfg] = (other, 1.0)
        tables[t] = PossTable(ps, rows)
    return tables


def random_evidence(
    rng: np.random.Generator, nodes, max_nodes: int = 3
) -> dict[int, bool]:
    nodes = list(nodes)
    count = int(rng.integers(0, min(max_nodes, len(nodes)) + 1))
    picked = rng.choice(len(nodes), size=count, replace=False)
    return {nodes[int(i)]: bool(rng.random() < 0.5) for i in picked}


def random_corpus(
    rng: np.random.Generator, n_docs: int = 8, vocab: int = 5, max_len: int = 6
) -> list[Document]:
    words = [f"w{i}" for i in range(vocab)]
    docs = []
    for d in range(n_docs):
        length = int(rng.integers(1, max_len + 1))
        toks = [words[int(i)] for i in rng.integers(0, vocab, size=length)]
        docs.append(Document(f"d{d:02d}", " ".join(toks)))
    return docs


def cpt_rows(tables) -> dict:
    """Oracle-facing view: node -> raw row mapping."""
    return {t: tab.rows for t, tab in tables.items()}
