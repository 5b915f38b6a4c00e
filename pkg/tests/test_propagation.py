import numpy as np
import pytest

from netret.bnr import pearl_propagate
from netret.errors import NotSinglyConnected
from netret.hybrid import poss_max_marginals
from netret.network import Dag
from netret.oracle import enum_poss_marginals, enum_prob_posteriors
from netret.pir import PossTable
from netret.propagation import SUM_PRODUCT, propagate

from helpers import (
    cpt_rows,
    random_cpts,
    random_evidence,
    random_forest,
    random_polytree,
    random_poss_tables,
)


class TestSumProductOnPolytrees:
    def test_matches_oracle_with_colliders(self):
        rng = np.random.default_rng(17)
        for _ in range(40):
            n = int(rng.integers(2, 11))
            dag = random_polytree(rng, n)
            cpts = random_cpts(rng, dag)
            evidence = random_evidence(rng, dag.term_nodes)
            got = pearl_propagate(dag, cpts, evidence)
            want = enum_prob_posteriors(dag.parents_map(), cpt_rows(cpts), evidence)
            for t in dag.term_nodes:
                assert got[t] == pytest.approx(want[t], abs=1e-9)

    def test_matches_oracle_on_forests(self):
        rng = np.random.default_rng(23)
        for _ in range(25):
            n = int(rng.integers(2, 10))
            dag = random_forest(rng, n)
            cpts = random_cpts(rng, dag)
            evidence = random_evidence(rng, dag.term_nodes)
            got = pearl_propagate(dag, cpts, evidence)
            want = enum_prob_posteriors(dag.parents_map(), cpt_rows(cpts), evidence)
            for t in dag.term_nodes:
                assert got[t] == pytest.approx(want[t], abs=1e-9)

    def test_long_chain_stays_finite(self):
        rng = np.random.default_rng(1)
        n = 300
        dag = Dag(range(n), [(i - 1, i) for i in range(1, n)])
        cpts = random_cpts(rng, dag)
        post = pearl_propagate(dag, cpts, {0: True, n - 1: False})
        assert all(0.0 <= p <= 1.0 for p in post.values())
        assert post[0] == 1.0
        assert post[n - 1] == 0.0

    def test_cycle_rejected(self):
        dag = Dag([0, 1, 2, 3], [(0, 1), (0, 2), (1, 3), (2, 3)])
        with pytest.raises(NotSinglyConnected):
            pearl_propagate(dag, {}, {})

    def test_unknown_evidence_node(self):
        dag = Dag([0])
        cpts = random_cpts(np.random.default_rng(0), dag)
        with pytest.raises(ValueError):
            propagate(dag.parents_map(), cpt_rows(cpts), {5: True}, SUM_PRODUCT)


class TestMaxSemiringsOnForests:
    @pytest.mark.parametrize("op", ["product", "min"])
    def test_matches_oracle(self, op):
        rng = np.random.default_rng(31)
        for _ in range(30):
            n = int(rng.integers(2, 10))
            dag = random_forest(rng, n) if rng.random() < 0.5 else random_polytree(rng, n)
            tables = random_poss_tables(rng, dag)
            evidence = random_evidence(rng, dag.term_nodes)
            got = poss_max_marginals(dag, tables, evidence, op)
            want = enum_poss_marginals(dag.parents_map(), cpt_rows(tables), evidence, op)
            for t in dag.term_nodes:
                if op == "min":
                    assert got[t] == want[t]
                else:
                    assert got[t][0] == pytest.approx(want[t][0], abs=1e-12)
                    assert got[t][1] == pytest.approx(want[t][1], abs=1e-12)

    def test_cross_component_evidence_scales_raw_values(self):
        # Two disconnected nodes; evidence on one must scale the other's raw pair.
        dag = Dag([0, 1])
        tables = {
            0: PossTable((), {(): (0.4, 1.0)}),
            1: PossTable((), {(): (0.7, 1.0)}),
        }
        raw = poss_max_marginals(dag, tables, {0: True}, "product")
        # Component of node 1 sees factor Pi(evidence in comp 0) = 0.4
        assert raw[1] == pytest.approx((0.4 * 0.7, 0.4 * 1.0), abs=1e-15)
        assert raw[0] == pytest.approx((0.4, 0.0), abs=1e-15)
