"""Vectorized point sets on a graph and exact pairwise distances.

A PointSet stores many points as parallel arrays (host edge index, edge
parameter, endpoint vertex indices, arc offsets to each endpoint).  The
distance between two points is the minimum over the four endpoint routes
plus, for points sharing a host edge, the direct arc; all of it evaluates
in closed form against the cached vertex distance matrix, so all-pairs
scans are O(n*m) numpy work with no graph traversal.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metric_graph import GraphPoint, MetricGraph


@dataclass
class PointSet:
    graph: MetricGraph
    edge_idx: np.ndarray   # host edge position in graph.edge_ids, int64
    t: np.ndarray          # edge-frame parameter in [0, 1], float64
    ia: np.ndarray         # vertex index of the host edge's first endpoint
    ib: np.ndarray
    ca: np.ndarray         # arc distance to the first endpoint: t * len
    cb: np.ndarray         # arc distance to the second endpoint

    def __len__(self) -> int:
        return len(self.t)

    def take(self, index) -> "PointSet":
        return PointSet(
            self.graph,
            self.edge_idx[index],
            self.t[index],
            self.ia[index],
            self.ib[index],
            self.ca[index],
            self.cb[index],
        )

    def graph_point(self, i: int) -> GraphPoint:
        eid = self.graph.edge_ids[int(self.edge_idx[i])]
        return self.graph.point(eid, float(self.t[i]))


def points_on_edges(g: MetricGraph, edge_idx, t) -> PointSet:
    edge_idx = np.asarray(edge_idx, dtype=np.int64)
    t = np.asarray(t, dtype=float)
    _, a_idx, b_idx, lens = g.edge_arrays()
    ell = lens[edge_idx]
    return PointSet(g, edge_idx, t, a_idx[edge_idx], b_idx[edge_idx], t * ell, (1.0 - t) * ell)


def net_on_graph(g: MetricGraph, mesh: float) -> tuple[PointSet, dict[int, slice]]:
    """Vertices plus subdivision points at spacing <= mesh on every edge.

    Points come grouped by edge in id order (each group includes both
    endpoints), with a map from edge position to its slice.  Vertices of
    degree > 1 therefore appear once per incident edge; duplicates are
    harmless for max/min scans.
    """
    if mesh <= 0:
        raise ValueError(f"mesh must be positive, got {mesh!r}")
    _, _, _, lens = g.edge_arrays()
    eidx_parts = []
    t_parts = []
    spans: dict[int, slice] = {}
    pos = 0
    for k, ell in enumerate(lens):
        n = max(1, int(np.ceil(ell / mesh)))
        ts = np.linspace(0.0, 1.0, n + 1)
        eidx_parts.append(np.full(len(ts), k, dtype=np.int64))
        t_parts.append(ts)
        spans[k] = slice(pos, pos + len(ts))
        pos += len(ts)
    pts = points_on_edges(g, np.concatenate(eidx_parts), np.concatenate(t_parts))
    return pts, spans


def net_on_segments(g: MetricGraph, segments, spacing: float) -> PointSet:
    """Subdivision points on ball segments (endpoints always included)."""
    eidx_parts = []
    t_parts = []
    ids = g.edge_ids
    pos_of = {e: i for i, e in enumerate(ids)}
    for seg in segments:
        ell = g.edge_length(seg.edge) * (seg.hi - seg.lo)
        n = max(1, int(np.ceil(ell / spacing))) if spacing > 0 else 1
        ts = np.linspace(seg.lo, seg.hi, n + 1)
        eidx_parts.append(np.full(len(ts), pos_of[seg.edge], dtype=np.int64))
        t_parts.append(ts)
    if not eidx_parts:
        return points_on_edges(g, np.zeros(0, dtype=np.int64), np.zeros(0))
    return points_on_edges(g, np.concatenate(eidx_parts), np.concatenate(t_parts))


def pairwise_distances(A: PointSet, B: PointSet) -> np.ndarray:
    """Exact distance matrix between two point sets on the same graph."""
    assert A.graph is B.graph
    dv = A.graph.vertex_distance_matrix()
    caA = A.ca[:, None]
    cbA = A.cb[:, None]
    caB = B.ca[None, :]
    cbB = B.cb[None, :]
    d = caA + dv[np.ix_(A.ia, B.ia)] + caB
    np.minimum(d, caA + dv[np.ix_(A.ia, B.ib)] + cbB, out=d)
    np.minimum(d, cbA + dv[np.ix_(A.ib, B.ia)] + caB, out=d)
    np.minimum(d, cbA + dv[np.ix_(A.ib, B.ib)] + cbB, out=d)
    same = A.edge_idx[:, None] == B.edge_idx[None, :]
    if same.any():
        direct = np.abs(A.ca[:, None] - B.ca[None, :])
        d[same] = np.minimum(d[same], direct[same])
    return d


def distances_to_point(A: PointSet, p: GraphPoint) -> np.ndarray:
    g = A.graph
    p = g.check_point(p)
    if p.is_vertex:
        B = _vertex_pointset(g, p.vertex)
    else:
        B = points_on_edges(g, [g.edge_position(p.edge)], [p.t])
    return pairwise_distances(A, B)[:, 0]


def _vertex_pointset(g: MetricGraph, v: str) -> PointSet:
    # host the vertex on any incident edge end so the route formula applies
    for k, eid in enumerate(g.edge_ids):
        a, b, _ = g.edge(eid)
        if a == v:
            return points_on_edges(g, [k], [0.0])
        if b == v:
            return points_on_edges(g, [k], [1.0])
    raise AssertionError(f"vertex {v!r} has no incident edge in a connected graph")


def pointset_of(g: MetricGraph, points) -> PointSet:
    """PointSet from an iterable of GraphPoints."""
    eidx = []
    ts = []
    for p in points:
        p = g.check_point(p)
        if p.is_vertex:
            ps = _vertex_pointset(g, p.vertex)
            eidx.append(int(ps.edge_idx[0]))
            ts.append(float(ps.t[0]))
        else:
            eidx.append(g.edge_position(p.edge))
            ts.append(p.t)
    return points_on_edges(g, np.array(eidx, dtype=np.int64), np.array(ts))
