import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bilip.metric_graph import BallSegment, GraphPoint, distance
from bilip.nets import (
    distances_to_point,
    net_on_graph,
    net_on_segments,
    pairwise_distances,
    points_on_edges,
    pointset_of,
)

from conftest import loop_graph, triangle
from oracles import oracle_distance
from strategies import graph_with_points, small_graphs

P = GraphPoint


class TestPointSet:
    def test_pointset_of_round_trips_points(self):
        g = triangle()
        pts = [P.at_vertex("A"), g.point("bc", 0.25), P.at_vertex("C")]
        ps = pointset_of(g, pts)
        assert len(ps) == 3
        for i, p in enumerate(pts):
            assert g.points_equal(ps.graph_point(i), p)

    def test_take_subsets(self):
        g = triangle()
        ps = pointset_of(g, [P.at_vertex("A"), P.at_vertex("B"), P.at_vertex("C")])
        sub = ps.take([0, 2])
        assert len(sub) == 2
        assert sub.graph_point(1) == P.at_vertex("C")

    def test_points_on_edges(self):
        g = triangle()
        ps = points_on_edges(
            g, np.array([0, 1]), np.array([0.5, 0.25])
        )
        assert g.points_equal(ps.graph_point(0), g.point(g.edge_ids[0], 0.5))
        assert g.points_equal(ps.graph_point(1), g.point(g.edge_ids[1], 0.25))


class TestNets:
    def test_net_covers_every_edge_with_given_spacing(self):
        g = triangle()
        ps, spans = net_on_graph(g, 0.25)
        assert set(spans) == {0, 1, 2}
        for pos, span in spans.items():
            eid = g.edge_ids[pos]
            ell = g.edge(eid)[2]
            ts = np.sort(ps.t[span])
            assert ts[0] <= 0.25 / ell + 1e-12
            assert ts[-1] >= 1.0 - 0.25 / ell - 1e-12
            gaps = np.diff(ts) * ell
            assert gaps.max() <= 0.25 + 1e-12

    @given(small_graphs(), st.floats(0.05, 1.0))
    @settings(max_examples=30)
    def test_net_spacing_bound_holds_generally(self, g, mesh):
        ps, spans = net_on_graph(g, mesh)
        assert len(ps) >= len(g.edge_ids)
        for pos, span in spans.items():
            ell = g.edge(g.edge_ids[pos])[2]
            ts = np.sort(ps.t[span])
            assert (np.diff(ts) * ell <= mesh + 1e-12).all()
            # ends are approximated within half a step
            assert ts[0] * ell <= mesh / 2 + 1e-12
            assert (1.0 - ts[-1]) * ell <= mesh / 2 + 1e-12

    def test_net_on_segments_respects_bounds(self):
        g = loop_graph(3.0)
        ps = net_on_segments(g, [BallSegment("l", 0.2, 0.8)], 0.1)
        assert len(ps) >= 2
        assert ps.t.min() >= 0.2 - 1e-12
        assert ps.t.max() <= 0.8 + 1e-12


class TestVectorizedDistances:
    @given(graph_with_points(count=4))
    @settings(max_examples=40)
    def test_pairwise_matrix_matches_pointwise_oracle(self, gp):
        g, pts = gp
        A = pointset_of(g, pts[:2])
        B = pointset_of(g, pts[2:])
        mat = pairwise_distances(A, B)
        assert mat.shape == (2, 2)
        for i in range(2):
            for j in range(2):
                want = oracle_distance(g, pts[i], pts[2 + j])
                assert mat[i, j] == pytest.approx(want, abs=1e-9)

    @given(graph_with_points(count=3))
    @settings(max_examples=40)
    def test_distances_to_point_matches_oracle(self, gp):
        g, pts = gp
        A = pointset_of(g, pts[:2])
        out = distances_to_point(A, pts[2])
        for i in range(2):
            assert out[i] == pytest.approx(oracle_distance(g, pts[i], pts[2]), abs=1e-9)

    def test_same_edge_direct_arc_beats_endpoint_routes(self):
        # two interior points on a long edge of a cycle: the matrix must
        # use the direct arc, not the detour through the endpoints
        g = loop_graph(10.0)
        A = pointset_of(g, [g.point("l", 0.45)])
        B = pointset_of(g, [g.point("l", 0.55)])
        assert pairwise_distances(A, B)[0, 0] == pytest.approx(1.0, abs=1e-12)
        assert distance(g, g.point("l", 0.45), g.point("l", 0.55)) == pytest.approx(
            1.0, abs=1e-12
        )
