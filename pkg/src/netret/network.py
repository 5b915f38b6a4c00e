"""Directed graphical structure over terms and documents.

The term layer is learned from the corpus as a maximum mutual-information
spanning forest, then oriented away from a per-tree root, which keeps it
singly connected. Document nodes hang below the terms that index them and
never have children.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from netret.corpus import CorpusIndex


@dataclass(frozen=True)
class Variable:
    """A binary network variable; domain is {relevant, not-relevant}."""

    kind: str  # "term" | "document"
    index: int | str


class Dag:
    """Term-layer arcs plus the document attachments.

    Construction validates node membership; ``validate_polytree`` checks
    the single-connectedness of the term layer.
    """

    def __init__(
        self,
        term_nodes: Sequence[int],
        term_arcs: Sequence[tuple[int, int]] = (),
        doc_parents: Mapping[str, Sequence[int]] | None = None,
    ) -> None:
        self.term_nodes: tuple[int, ...] = tuple(term_nodes)
        node_set = set(self.term_nodes)
        if len(node_set) != len(self.term_nodes):
            raise ValueError("duplicate term nodes")
        self.term_arcs: tuple[tuple[int, int], ...] = tuple(
            (int(p), int(c)) for p, c in term_arcs
        )
        parents: dict[int, list[int]] = {t: [] for t in self.term_nodes}
        children: dict[int, list[int]] = {t: [] for t in self.term_nodes}
        for p, c in self.term_arcs:
            if p not in node_set or c not in node_set:
                raise ValueError(f"arc ({p}, {c}) references unknown term node")
            if p == c:
                raise ValueError("self loop")
            parents[c].append(p)
            children[p].append(c)
        self._parents = {t: tuple(ps) for t, ps in parents.items()}
        self._children = {t: tuple(cs) for t, cs in children.items()}
        self.doc_parents: dict[str, tuple[int, ...]] = {}
        for doc_id, ps in (doc_parents or {}).items():
            ps = tuple(int(t) for t in ps)
            if not ps:
                raise ValueError(f"document node {doc_id} needs >= 1 term parent")
            if any(t not in node_set for t in ps):
                raise ValueError(f"document {doc_id} has a non-term parent")
            self.doc_parents[doc_id] = ps

    def term_parents(self, t: int) -> tuple[int, ...]:
        return self._parents[t]

    def term_children(self, t: int) -> tuple[int, ...]:
        return self._children[t]

    @property
    def roots(self) -> tuple[int, ...]:
        return tuple(t for t in self.term_nodes if not self._parents[t])

    def parents_map(self) -> dict[int, tuple[int, ...]]:
        """Term-layer structure as a plain mapping, for the inference engines."""
        return {t: self._parents[t] for t in self.term_nodes}

    def variables(self) -> list[Variable]:
        return [Variable("term", t) for t in self.term_nodes] + [
            Variable("document", d) for d in sorted(self.doc_parents)
        ]

    def to_dict(self) -> dict:
        return {
            "term_nodes": list(self.term_nodes),
            "arcs": [list(a) for a in self.term_arcs],
            "roots": list(self.roots),
            "doc_parents": {d: list(ps) for d, ps in sorted(self.doc_parents.items())},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Dag":
        return cls(
            data["term_nodes"],
            [tuple(a) for a in data["arcs"]],
            data.get("doc_parents") or None,
        )


def validate_polytree(dag: Dag) -> bool:
    """True iff the undirected term layer is a forest.

    Arc-direction constraints (documents only receive term arcs and have
    no children) are enforced structurally by the Dag constructor.
    """
    uf = {t: t for t in dag.term_nodes}

    def find(a: int) -> int:
        while uf[a] != a:
            uf[a] = uf[uf[a]]
            a = uf[a]
        return a

    for p, c in dag.term_arcs:
        rp, rc = find(p), find(c)
        if rp == rc:
            return False
        uf[rp] = rc
    return True


def mutual_information(index: CorpusIndex, i: int, k: int) -> float:
    """MI in nats between the presence indicators of two terms.

    Maximum-likelihood counts over all N documents; zero cells contribute
    zero. Exactly independent columns yield exactly 0.0.
    """
    if i == k:
        raise ValueError("mutual information requires two distinct terms")
    n = index.n_docs
    n11 = index.cooccurrence(i, k)
    di, dk = index.df[i], index.df[k]
    cells = (
        (n11, di, dk),
        (di - n11, di, n - dk),
        (dk - n11, n - di, dk),
        (n - di - dk + n11, n - di, n - dk),
    )
    mi = 0.0
    for n_ab, n_a, n_b in cells:
        if n_ab == 0 or n_ab * n == n_a * n_b:
            continue  # zero cell or exact independence: contributes 0
        mi += (n_ab / n) * math.log(n_ab * n / (n_a * n_b))
    return mi


def maximum_weight_forest(
    edges: Sequence[tuple[int, int, float]], num_vertices: int
) -> list[tuple[int, int, float]]:
    """Kruskal maximum spanning forest; ties broken by (min id, max id)."""
    order = sorted(edges, key=lambda e: (-e[2], min(e[0], e[1]), max(e[0], e[1])))
    uf = list(range(num_vertices))

    def find(a: int) -> int:
        while uf[a] != a:
            uf[a] = uf[uf[a]]
            a = uf[a]
        return a

    picked: list[tuple[int, int, float]] = []
    for a, b, w in order:
        ra, rb = find(a), find(b)
        if ra != rb:
            uf[ra] = rb
            picked.append((min(a, b), max(a, b), w))
    picked.sort(key=lambda e: (e[0], e[1]))
    return picked


def chow_liu_forest(index: CorpusIndex) -> list[tuple[int, int, float]]:
    """Maximum-total-MI spanning forest of the positive-MI term graph.

    Edges with MI 0 are excluded, so independent terms stay disconnected.
    """
    m = index.vocab_size
    candidates = []
    for i in range(m):
        for j in range(i + 1, m):
            w = mutual_information(index, i, j)
            if w > 0.0:
                candidates.append((i, j, w))
    return maximum_weight_forest(candidates, m)


def orient_forest(
    forest: Sequence[tuple[int, int, float]], index: CorpusIndex
) -> Dag:
    """Direct each tree away from its root (highest df, ties to lowest id)."""
    m = index.vocab_size
    adj: dict[int, list[int]] = {t: [] for t in range(m)}
    uf = list(range(m))

    def find(a: int) -> int:
        while uf[a] != a:
            uf[a] = uf[uf[a]]
            a = uf[a]
        return a

    for a, b, _ in forest:
        if find(a) == find(b):
            raise ValueError("input edges contain a cycle; not a forest")
        uf[find(a)] = find(b)
        adj[a].append(b)
        adj[b].append(a)

    components: dict[int, list[int]] = {}
    for t in range(m):
        components.setdefault(find(t), []).append(t)

    arcs: list[tuple[int, int]] = []
    for members in components.values():
        root = min(members, key=lambda t: (-index.df[t], t))
        stack = [root]
        seen = {root}
        while stack:
            u = stack.pop()
            for v in sorted(adj[u]):
                if v not in seen:
                    seen.add(v)
                    arcs.append((u, v))
                    stack.append(v)
    arcs.sort()
    return Dag(range(m), arcs)


def attach_documents(dag: Dag, index: CorpusIndex) -> Dag:
    """Add one document node per rankable document, parented by its terms."""
    doc_parents = {
        doc_id: tuple(sorted(index.doc_terms(doc_id)))
        for doc_id in index.rankable_doc_ids
    }
    return Dag(dag.term_nodes, dag.term_arcs, doc_parents)


def learn_structure(index: CorpusIndex) -> Dag:
    """Chow-Liu forest, oriented, with documents attached."""
    return attach_documents(orient_forest(chow_liu_forest(index), index), index)
