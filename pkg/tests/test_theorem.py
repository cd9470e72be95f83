import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bilip.corpus import gen_cycle_cover, gen_mcsimpleminded, gen_tree_perturbed
from bilip.errors import PrerequisiteMissing
from bilip.graph_map import GraphMap
from bilip.metric_graph import GraphPoint, MetricGraph, distance
from bilip.theorem import (
    TheoremReport,
    global_bilipschitz_oracle,
    lower_bound_via_disjoint_balls,
    verify_theorem,
)

from conftest import cover_map, fold_map, identity_map, path_graph, scale_map, triangle

P = GraphPoint

HYPOTHESIS_KEYS = {
    "L",
    "r_0",
    "q",
    "C_domain",
    "C_codomain",
    "cycle_rank_codomain",
    "local_injectivity",
    "escaped",
}


class TestOracle:
    def test_identity_measures_one(self):
        rep = global_bilipschitz_oracle(identity_map(triangle()))
        assert rep.L == pytest.approx(1.0, abs=1e-9)
        assert rep.noninjective is None
        assert rep.pair_count > 0
        assert rep.witness_upper is not None
        assert rep.witness_lower is not None

    def test_compression_measures_its_factor(self):
        rep = global_bilipschitz_oracle(scale_map(2.0))
        assert rep.L == pytest.approx(2.0, abs=1e-9)

    def test_cover_is_globally_noninjective(self):
        rep = global_bilipschitz_oracle(cover_map(6, 3))
        assert rep.noninjective is not None
        assert math.isinf(rep.L)
        p, q, d = rep.noninjective
        c = cover_map(6, 3)
        assert d > 0
        assert distance(c.domain, p, q) == pytest.approx(d, abs=1e-9)
        img_d = distance(c.codomain, c.point_image(p), c.point_image(q))
        assert img_d <= 1e-9

    def test_mesh_override_thins_the_net(self):
        coarse = global_bilipschitz_oracle(identity_map(triangle()), mesh=0.5)
        fine = global_bilipschitz_oracle(identity_map(triangle()), mesh=0.1)
        assert coarse.pair_count < fine.pair_count


class TestVerifyTheorem:
    def test_certifies_a_perturbed_tree(self, tree_small):
        rep = verify_theorem(tree_small)
        assert rep.verdict == "Certified"
        assert rep.failed_hypothesis is None
        # independent closed form: worst per-edge ratio in either direction
        want = max(
            max(tree_small.stretch(e), 1.0 / tree_small.stretch(e))
            for e in tree_small.domain.edge_ids
        )
        assert rep.L == pytest.approx(want, abs=1e-9)
        assert rep.oracle.L <= rep.L + 1e-9
        assert set(rep.hypotheses) == HYPOTHESIS_KEYS
        assert rep.hypotheses["cycle_rank_codomain"] == 0
        assert rep.hypotheses["local_injectivity"] is True
        assert rep.hypotheses["escaped"] is False
        assert rep.hypotheses["C_domain"] >= 1.0
        assert rep.hypotheses["C_codomain"] >= 1.0
        assert rep.local_report is not None
        assert "total" in rep.runtime

    def test_cover_fails_simple_connectivity_only(self):
        rep = verify_theorem(gen_cycle_cover(6, 3)[0])
        assert rep.verdict == "HypothesisFailure"
        assert rep.failed_hypothesis == "simply_connected"
        assert rep.L is None
        assert rep.hypotheses["L"] == pytest.approx(1.0, abs=1e-9)
        assert rep.hypotheses["local_injectivity"] is True
        assert rep.hypotheses["cycle_rank_codomain"] == 1
        assert rep.oracle.noninjective is not None

    def test_fold_fails_local_injectivity(self):
        rep = verify_theorem(fold_map())
        assert rep.verdict == "HypothesisFailure"
        assert rep.failed_hypothesis == "local_injectivity"
        assert rep.witness is not None

    def test_tunnel_fails_with_escape_recorded(self):
        rep = verify_theorem(gen_mcsimpleminded(10, 3)[0])
        assert rep.verdict == "HypothesisFailure"
        assert rep.failed_hypothesis == "simply_connected"
        assert rep.hypotheses["escaped"] is True
        assert rep.hypotheses["L"] == pytest.approx(1.0, abs=1e-9)

    def test_broken_edge_walk_fails_structure(self):
        dom = path_graph([1.0])
        cod = triangle()
        m = GraphMap(dom, cod, {"p0": "A", "p1": "A"}, {"e0": ["ab"]})
        rep = verify_theorem(m)
        assert rep.verdict == "HypothesisFailure"
        assert rep.failed_hypothesis == "map_structure"
        assert rep.witness.kind == "continuity"

    def test_incomplete_tree_embedding_escapes(self):
        # domain path included in a strictly larger codomain tree: lifting
        # geodesics off the far end leaves the domain, and with no marked
        # boundary the quotient stage reports the missing continuation
        dom = path_graph([1.0, 1.0])
        cod = path_graph([1.0, 1.0, 1.0])
        m = GraphMap(
            dom,
            cod,
            {v: v for v in dom.vertex_ids},
            {e: [e] for e in dom.edge_ids},
        )
        rep = verify_theorem(m)
        assert rep.verdict == "HypothesisFailure"
        assert rep.failed_hypothesis == "lq"

    def test_explicit_radius_is_respected(self, tree_small):
        rep = verify_theorem(tree_small, r_0=0.05)
        assert rep.hypotheses["r_0"] == 0.05
        assert rep.verdict == "Certified"

    @given(st.integers(1, 200), st.integers(2, 7))
    @settings(max_examples=15)
    def test_random_trees_always_certify(self, seed, n):
        m, _ = gen_tree_perturbed(n, 3.0, seed)
        rep = verify_theorem(m)
        assert rep.verdict == "Certified"
        assert rep.oracle.L <= rep.L + 1e-9


class TestLowerBound:
    def test_tree_bound_is_distance_over_constant(self, tree_small):
        L = verify_theorem(tree_small).L
        x, y = P.at_vertex("v0"), P.at_vertex("v5")
        got = lower_bound_via_disjoint_balls(tree_small, x, y, L)
        want = distance(tree_small.domain, x, y) / L
        assert got == pytest.approx(want, rel=1e-12)
        # the bound is sound: the true image distance dominates it
        d_img = distance(
            tree_small.codomain,
            tree_small.point_image(x),
            tree_small.point_image(y),
        )
        assert d_img >= got - 1e-9

    def test_identity_is_tight(self):
        m = identity_map(triangle())
        got = lower_bound_via_disjoint_balls(m, P.at_vertex("A"), P.at_vertex("B"), 1.0)
        assert got == pytest.approx(1.0, abs=1e-9)

    def test_rejects_coincident_points(self, tree_small):
        with pytest.raises(PrerequisiteMissing):
            lower_bound_via_disjoint_balls(
                tree_small, P.at_vertex("v0"), P.at_vertex("v0"), 2.0
            )

    def test_requires_certified_injectivity(self):
        c = cover_map(6, 3)
        with pytest.raises(PrerequisiteMissing):
            lower_bound_via_disjoint_balls(c, P.at_vertex("d0"), P.at_vertex("d3"), 1.0)
