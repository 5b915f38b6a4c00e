"""Brute-force reference semantics for every inference path.

These functions enumerate full configurations and apply the joint
factorization directly, so they are slow by design and guarded by hard
node limits. They are the ground truth the message-passing engines and
the structure learner are tested against.
"""

from __future__ import annotations

import itertools
from typing import Hashable, Mapping, Sequence

import numpy as np

from netret.errors import TooLarge, ZeroEvidence
from netret.propagation import Pair

MAX_ENUM_NODES = 20
MAX_FOREST_VERTICES = 6

Node = Hashable


def _factor_matrix(
    nodes: list[Node],
    parents: Mapping[Node, Sequence[Node]],
    tables: Mapping[Node, Mapping[tuple[bool, ...], Pair]],
) -> tuple[np.ndarray, np.ndarray]:
    """All configurations and the per-node table values they select.

    Returns (assign, factors): assign is a (2^n, n) boolean matrix (True =
    relevant) and factors a (2^n, n) float matrix with the table entry each
    node contributes under each configuration.
    """
    n = len(nodes)
    pos = {v: i for i, v in enumerate(nodes)}
    assign = np.array(
        list(itertools.product((True, False), repeat=n)), dtype=bool
    ).reshape(-1, n)
    factors = np.empty((len(assign), n), dtype=float)
    for col, v in enumerate(nodes):
        ps = list(parents[v])
        m = len(ps)
        rows = np.empty((1 << m, 2), dtype=float)
        for cfg in itertools.product((True, False), repeat=m):
            code = sum(1 << i for i, b in enumerate(cfg) if b)
            rows[code] = tables[v][cfg]
        if m:
            cols = assign[:, [pos[p] for p in ps]].astype(np.int64)
            codes = (cols << np.arange(m)).sum(axis=1)
        else:
            codes = np.zeros(len(assign), dtype=np.int64)
        factors[:, col] = rows[codes, np.where(assign[:, col], 0, 1)]
    return assign, factors


def _check_size(parents: Mapping) -> list[Node]:
    nodes = list(parents)
    if len(nodes) > MAX_ENUM_NODES:
        raise TooLarge(f"{len(nodes)} nodes exceed the enumeration guard")
    return nodes


def _evidence_mask(
    nodes: list[Node], assign: np.ndarray, evidence: Mapping[Node, bool]
) -> np.ndarray:
    mask = np.ones(len(assign), dtype=bool)
    pos = {v: i for i, v in enumerate(nodes)}
    for v, val in evidence.items():
        mask &= assign[:, pos[v]] == val
    return mask


def enum_prob_posteriors(
    parents: Mapping[Node, Sequence[Node]],
    tables: Mapping[Node, Mapping[tuple[bool, ...], Pair]],
    evidence: Mapping[Node, bool],
) -> dict[Node, float]:
    """Posterior p(node relevant | evidence) by summing the explicit joint."""
    nodes = _check_size(parents)
    assign, factors = _factor_matrix(nodes, parents, tables)
    joint = factors.prod(axis=1)
    mask = _evidence_mask(nodes, assign, evidence)
    denom = joint[mask].sum()
    if denom <= 0.0:
        raise ZeroEvidence("no probability mass is consistent with the evidence")
    return {
        v: float(joint[mask & assign[:, i]].sum() / denom)
        for i, v in enumerate(nodes)
    }


def enum_poss_marginals(
    parents: Mapping[Node, Sequence[Node]],
    tables: Mapping[Node, Mapping[tuple[bool, ...], Pair]],
    evidence: Mapping[Node, bool],
    op: str = "product",
) -> dict[Node, Pair]:
    """Unnormalized max-marginals under the product or min combination."""
    nodes = _check_size(parents)
    assign, factors = _factor_matrix(nodes, parents, tables)
    if op == "product":
        joint = factors.prod(axis=1)
    elif op == "min":
        joint = factors.min(axis=1)
    else:
        raise ValueError(f"unknown operator {op!r}")
    mask = _evidence_mask(nodes, assign, evidence)

    def best(sel: np.ndarray) -> float:
        return float(joint[sel].max()) if sel.any() else 0.0

    return {
        v: (best(mask & assign[:, i]), best(mask & ~assign[:, i]))
        for i, v in enumerate(nodes)
    }


def enum_pir_joint(
    query_terms: Sequence[int],
    doc_id: str,
    tables: Mapping,
    semantics: str = "and",
) -> tuple[float, float]:
    """Literal max over all instances of the query parent set.

    For each document state, every instance contributes the query gate
    times the product of the selected conditional or prior entries times
    the document prior; the joint is the max of those contributions.
    """
    if len(query_terms) > MAX_ENUM_NODES:
        raise TooLarge(f"{len(query_terms)} query terms exceed the guard")
    if semantics not in ("and", "or"):
        raise ValueError(f"unknown query semantics {semantics!r}")
    prior = tables[doc_id].rows[()]
    out = []
    for val_idx, d_val in ((0, True), (1, False)):
        best = 0.0
        for theta in itertools.product((True, False), repeat=len(query_terms)):
            if semantics == "and":
                gate = all(theta)
            else:
                gate = any(theta)
            if not gate:
                continue
            value = prior[val_idx]
            for tid, rel in zip(query_terms, theta):
                table = tables[tid]
                row = table.rows[(d_val,)] if table.parents else table.rows[()]
                value *= row[0] if rel else row[1]
            best = max(best, value)
        out.append(best)
    return (out[0], out[1])


def best_spanning_forest(
    weights: Mapping[tuple[int, int], float], num_vertices: int
) -> tuple[frozenset[tuple[int, int]], float]:
    """Exhaustive maximum-weight spanning forest over positive edges."""
    if num_vertices > MAX_FOREST_VERTICES:
        raise TooLarge(f"{num_vertices} vertices exceed the forest guard")
    edges = [
        (min(i, j), max(i, j), w)
        for (i, j), w in sorted(weights.items())
        if w > 0.0
    ]
    best_edges: frozenset[tuple[int, int]] = frozenset()
    best_total = 0.0
    for bits in range(1 << len(edges)):
        uf = list(range(num_vertices))

        def find(a: int) -> int:
            while uf[a] != a:
                uf[a] = uf[uf[a]]
                a = uf[a]
            return a

        total = 0.0
        acyclic = True
        chosen = []
        for idx, (a, b, w) in enumerate(edges):
            if not bits >> idx & 1:
                continue
            ra, rb = find(a), find(b)
            if ra == rb:
                acyclic = False
                break
            uf[ra] = rb
            total += w
            chosen.append((a, b))
        if acyclic and total > best_total:
            best_total = total
            best_edges = frozenset(chosen)
    return best_edges, best_total
