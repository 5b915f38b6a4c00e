"""Exact two-pass message passing on singly connected binary networks.

One schedule serves three semantics: probabilistic sum-product (Pearl's
lambda/pi algorithm), possibilistic max-product and possibilistic
max-min. A message travels along each skeleton edge in both directions;
a message out of node ``a`` toward ``b`` is ready once every other
neighbor of ``a`` has sent to ``a``, which a leaf-first queue satisfies
in a single sweep. Value pairs are ordered (relevant, not-relevant).
"""

from __future__ import annotations

import itertools
import operator
from collections import deque
from typing import Callable, Hashable, Mapping, Sequence

from netret.errors import NotSinglyConnected

Pair = tuple[float, float]
Node = Hashable


class Semiring:
    __slots__ = ("name", "add", "mul")

    def __init__(self, name: str, add: Callable, mul: Callable) -> None:
        self.name = name
        self.add = add
        self.mul = mul

    def __repr__(self) -> str:
        return f"Semiring({self.name})"


SUM_PRODUCT = Semiring("sum-product", operator.add, operator.mul)
MAX_PRODUCT = Semiring("max-product", max, operator.mul)
MAX_MIN = Semiring("max-min", max, min)


def propagate(
    parents: Mapping[Node, Sequence[Node]],
    tables: Mapping[Node, Mapping[tuple[bool, ...], Pair]],
    evidence: Mapping[Node, bool],
    semiring: Semiring,
    scale_messages: bool = False,
) -> tuple[dict[Node, Pair], dict[Node, int], list[float]]:
    """Run message passing and return (beliefs, component, component_total).

    ``parents`` defines the whole network; table rows are keyed by tuples
    of parent values aligned with the parent order (True = relevant) and
    root tables hold the single empty config. ``beliefs[v]`` combines, over
    all completions within v's connected component, the semiring product of
    every local table entry and the evidence indicators, i.e. the exact
    unnormalized marginal of v jointly with the component's evidence.
    ``component_total[c]`` is that combination with v marginalized out too.

    With ``scale_messages`` each message is rescaled to sum 1 (sum-product
    only; keeps long chains away from underflow, cancels in posteriors).
    """
    nodes = list(parents)
    node_set = set(nodes)
    children: dict[Node, list[Node]] = {v: [] for v in nodes}
    for v in nodes:
        ps = parents[v]
        if len(set(ps)) != len(ps):
            raise NotSinglyConnected(f"node {v!r} lists a parent twice")
        for p in ps:
            if p not in node_set:
                raise ValueError(f"unknown parent {p!r} of node {v!r}")
            children[p].append(v)
    for v in evidence:
        if v not in node_set:
            raise ValueError(f"evidence on unknown node {v!r}")

    # Underlying undirected graph must be a forest.
    uf: dict[Node, Node] = {v: v for v in nodes}

    def find(a: Node) -> Node:
        while uf[a] != a:
            uf[a] = uf[uf[a]]
            a = uf[a]
        return a

    n_edges = 0
    for v in nodes:
        for p in parents[v]:
            rp, rv = find(p), find(v)
            if rp == rv:
                raise NotSinglyConnected("undirected cycle in the network")
            uf[rp] = rv
            n_edges += 1

    mul = semiring.mul
    add = semiring.add
    nbrs = {v: tuple(parents[v]) + tuple(children[v]) for v in nodes}
    cfgs = {
        v: list(itertools.product((True, False), repeat=len(parents[v])))
        for v in nodes
    }

    def ev_pair(v: Node) -> Pair:
        if v not in evidence:
            return (1.0, 1.0)
        return (1.0, 0.0) if evidence[v] else (0.0, 1.0)

    msg: dict[tuple[Node, Node], Pair] = {}

    def fused(v: Node, exclude_child: Node | None) -> Pair:
        """Evidence times pi-self times every child message except one.

        With ``exclude_child`` None this is the belief at v; otherwise it
        is the pi message v sends to that child.
        """
        rows = tables[v]
        ps = parents[v]
        ev = ev_pair(v)
        out = []
        for val_idx in (0, 1):
            acc = None
            for cfg in cfgs[v]:
                term = rows[cfg][val_idx]
                for p, pv in zip(ps, cfg):
                    term = mul(term, msg[(p, v)][0 if pv else 1])
                acc = term if acc is None else add(acc, term)
            x = mul(ev[val_idx], acc)
            for y in children[v]:
                if y != exclude_child:
                    x = mul(x, msg[(y, v)][val_idx])
            out.append(x)
        return (out[0], out[1])

    def lambda_message(x: Node, u: Node) -> Pair:
        """Message from child x to its parent u, indexed by u's values."""
        ps = parents[x]
        i = ps.index(u) if isinstance(ps, tuple) else list(ps).index(u)
        rows = tables[x]
        ev = ev_pair(x)
        down = []
        for val_idx in (0, 1):
            d = ev[val_idx]
            for y in children[x]:
                d = mul(d, msg[(y, x)][val_idx])
            down.append(d)
        out = []
        for u_val in (True, False):
            acc = None
            for cfg in cfgs[x]:
                if cfg[i] != u_val:
                    continue
                for x_idx in (0, 1):
                    term = rows[cfg][x_idx]
                    for k, (p, pv) in enumerate(zip(ps, cfg)):
                        if k != i:
                            term = mul(term, msg[(p, x)][0 if pv else 1])
                    term = mul(term, down[x_idx])
                    acc = term if acc is None else add(acc, term)
            out.append(acc)
        return (out[0], out[1])

    pending: dict[tuple[Node, Node], int] = {}
    ready: deque[tuple[Node, Node]] = deque()
    for a in nodes:
        need = len(nbrs[a]) - 1
        for b in nbrs[a]:
            pending[(a, b)] = need
            if need == 0:
                ready.append((a, b))

    parent_sets = {v: set(parents[v]) for v in nodes}
    done = 0
    while ready:
        a, b = ready.popleft()
        if b in parent_sets[a]:
            vec = lambda_message(a, b)
        else:
            vec = fused(a, exclude_child=b)
        if scale_messages:
            s = vec[0] + vec[1]
            if s > 0.0:
                vec = (vec[0] / s, vec[1] / s)
        msg[(a, b)] = vec
        done += 1
        for c in nbrs[b]:
            if c != a:
                pending[(b, c)] -= 1
                if pending[(b, c)] == 0:
                    ready.append((b, c))
    assert done == 2 * n_edges, "message schedule did not cover the forest"

    beliefs = {v: fused(v, None) for v in nodes}

    comp_root: dict[Node, int] = {}
    component: dict[Node, int] = {}
    totals: list[float] = []
    for v in nodes:
        r = find(v)
        if r not in comp_root:
            comp_root[r] = len(totals)
            pair = beliefs[v]
            totals.append(add(pair[0], pair[1]))
        component[v] = comp_root[r]
    return beliefs, component, totals
