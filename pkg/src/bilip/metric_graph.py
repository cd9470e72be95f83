"""Finite weighted multigraphs as path-metric measure spaces.

A graph here is a connected multigraph (self-loops and parallel edges
allowed) with positive finite edge lengths.  Points live on vertices or in
edge interiors, distance is the infimum of walk lengths, and the measure of
a region is the total length it covers.  Everything downstream (maps,
lifting, the theorem pipeline) reduces to the primitives in this module.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    EmptySampleSet,
    InputError,
    NonpositiveRadius,
    PointNotOnGraph,
)

REL_TOL = 1e-9
ABS_TOL = 1e-12
# parameter-space snap: t within this of 0/1 collapses to the vertex form
PARAM_SNAP = 1e-12


def tol(scale: float = 1.0) -> float:
    """Comparison tolerance: relative 1e-9 with an absolute floor of 1e-12."""
    return max(REL_TOL * abs(scale), ABS_TOL)


def close(a: float, b: float, scale: float | None = None) -> bool:
    s = max(abs(a), abs(b)) if scale is None else scale
    return abs(a - b) <= tol(s)


@dataclass(frozen=True)
class GraphPoint:
    """A point of a graph: a vertex, or an interior position on an edge.

    Interior points carry the host edge id and the parameter t in (0, 1),
    measured as a fraction of the edge length from the edge's first
    endpoint.  t = 0 or 1 is always normalized away to the vertex form.
    """

    vertex: str | None = None
    edge: str | None = None
    t: float = 0.0

    @staticmethod
    def at_vertex(v: str) -> "GraphPoint":
        return GraphPoint(vertex=v)

    @staticmethod
    def interior(edge: str, t: float) -> "GraphPoint":
        return GraphPoint(vertex=None, edge=edge, t=float(t))

    @property
    def is_vertex(self) -> bool:
        return self.vertex is not None

    def __repr__(self) -> str:  # compact, shows up in witnesses
        if self.is_vertex:
            return f"Point(v={self.vertex!r})"
        return f"Point(e={self.edge!r}, t={self.t:.6g})"


class MetricGraph:
    """Immutable weighted multigraph with cached shortest-path structure.

    ``edges`` is an iterable of ``(edge_id, a, b, length)``.  Vertex and
    edge ids are opaque strings.  ``boundary`` marks vertices that stand in
    for truncated, non-compact directions; the metric ignores them but the
    lifting machinery refuses to continue past them.

    Instances are treated as immutable after construction; lazy caches are
    fill-once and safe to share between readers.
    """

    def __init__(
        self,
        vertices: Iterable[str],
        edges: Iterable[tuple],
        boundary: Iterable[str] = (),
    ):
        vs = list(vertices)
        if not vs:
            raise InputError("graph needs at least one vertex")
        for v in vs:
            if not isinstance(v, str):
                raise InputError(f"vertex id {v!r} is not a string")
        if len(set(vs)) != len(vs):
            raise InputError("duplicate vertex ids")
        self._vertices: tuple[str, ...] = tuple(sorted(vs))
        vset = set(self._vertices)

        edict: dict[str, tuple[str, str, float]] = {}
        for item in edges:
            try:
                eid, a, b, length = item
            except (TypeError, ValueError):
                raise InputError(f"edge record {item!r} is not (id, a, b, length)")
            if not isinstance(eid, str):
                raise InputError(f"edge id {eid!r} is not a string")
            if eid in edict:
                raise InputError(f"duplicate edge id {eid!r}")
            if a not in vset or b not in vset:
                raise InputError(f"edge {eid!r} references unknown vertex")
            length = float(length)
            if not math.isfinite(length) or length <= 0.0:
                raise InputError(f"edge {eid!r} has nonpositive length {length!r}")
            edict[eid] = (a, b, length)
        if not edict:
            raise InputError("graph needs at least one edge (measure must not vanish)")
        self._edges = edict
        self._edge_ids: tuple[str, ...] = tuple(sorted(edict))

        bd = set(boundary)
        if not bd <= vset:
            raise InputError(f"boundary markers {sorted(bd - vset)} are not vertices")
        self._boundary = frozenset(bd)

        adj: dict[str, list[tuple[str, float, str]]] = {v: [] for v in self._vertices}
        for eid in self._edge_ids:
            a, b, length = edict[eid]
            adj[a].append((b, length, eid))
            if a != b:
                adj[b].append((a, length, eid))
        for v in adj:
            adj[v].sort(key=lambda rec: rec[2])
        self._adj = adj

        self._vindex = {v: i for i, v in enumerate(self._vertices)}
        self._check_connected()

        # lazy caches
        self._dmat: np.ndarray | None = None
        self._trees: dict[str, tuple[dict[str, float], dict[str, tuple[str, str]]]] = {}
        self._edge_arrays: tuple | None = None

    # -- structure -----------------------------------------------------

    @property
    def vertex_ids(self) -> tuple[str, ...]:
        return self._vertices

    @property
    def edge_ids(self) -> tuple[str, ...]:
        return self._edge_ids

    @property
    def boundary(self) -> frozenset[str]:
        return self._boundary

    def edge(self, eid: str) -> tuple[str, str, float]:
        try:
            return self._edges[eid]
        except KeyError:
            raise PointNotOnGraph(f"unknown edge {eid!r}")

    def edge_length(self, eid: str) -> float:
        return self.edge(eid)[2]

    def has_vertex(self, v: str) -> bool:
        return v in self._vindex

    def total_length(self) -> float:
        return sum(rec[2] for rec in self._edges.values())

    def degree(self, v: str) -> int:
        return len(self.germs(v))

    def germs(self, v: str) -> tuple[tuple[str, int], ...]:
        """Edge-ends incident to v, as (edge_id, end) with end in {0, 1}.

        A self-loop at v contributes both ends.
        """
        if v not in self._vindex:
            raise PointNotOnGraph(f"unknown vertex {v!r}")
        out = []
        for eid in self._edge_ids:
            a, b, _ = self._edges[eid]
            if a == v:
                out.append((eid, 0))
            if b == v:
                out.append((eid, 1))
        return tuple(out)

    def vertex_index(self, v: str) -> int:
        try:
            return self._vindex[v]
        except KeyError:
            raise PointNotOnGraph(f"unknown vertex {v!r}")

    def _check_connected(self) -> None:
        seen = {self._vertices[0]}
        stack = [self._vertices[0]]
        while stack:
            v = stack.pop()
            for w, _, _ in self._adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(self._vertices):
            missing = sorted(set(self._vertices) - seen)
            raise InputError(f"graph is not connected; unreachable: {missing}")

    # -- points ----------------------------------------------------------

    def vertex_point(self, v: str) -> GraphPoint:
        if v not in self._vindex:
            raise PointNotOnGraph(f"unknown vertex {v!r}")
        return GraphPoint.at_vertex(v)

    def point(self, eid: str, t: float) -> GraphPoint:
        """Point on edge ``eid`` at parameter t, normalized at the ends."""
        a, b, _ = self.edge(eid)
        t = float(t)
        if t <= PARAM_SNAP:
            if t < -PARAM_SNAP:
                raise PointNotOnGraph(f"parameter {t!r} outside [0, 1] on {eid!r}")
            return GraphPoint.at_vertex(a)
        if t >= 1.0 - PARAM_SNAP:
            if t > 1.0 + PARAM_SNAP:
                raise PointNotOnGraph(f"parameter {t!r} outside [0, 1] on {eid!r}")
            return GraphPoint.at_vertex(b)
        return GraphPoint.interior(eid, t)

    def check_point(self, p: GraphPoint) -> GraphPoint:
        """Validate that ``p`` lives on this graph; returns it normalized."""
        if not isinstance(p, GraphPoint):
            raise PointNotOnGraph(f"not a graph point: {p!r}")
        if p.is_vertex:
            return self.vertex_point(p.vertex)
        return self.point(p.edge, p.t)

    def points_equal(self, p: GraphPoint, q: GraphPoint) -> bool:
        """Equality up to parameter tolerance (after normalization)."""
        p = self.check_point(p)
        q = self.check_point(q)
        if p.is_vertex and q.is_vertex:
            return p.vertex == q.vertex
        if p.is_vertex != q.is_vertex:
            return False
        return p.edge == q.edge and abs(p.t - q.t) <= REL_TOL

    # -- shortest paths ---------------------------------------------------

    def _tree(self, source: str) -> tuple[dict[str, float], dict[str, tuple[str, str]]]:
        """Dijkstra tree from a vertex: (distances, predecessor map).

        pred[v] = (previous vertex, edge id) along one shortest path.
        Deterministic: adjacency is sorted by edge id and ties pop by
        vertex order.
        """
        if source in self._trees:
            return self._trees[source]
        dist = {source: 0.0}
        pred: dict[str, tuple[str, str]] = {}
        done: set[str] = set()
        heap: list[tuple[float, int, str]] = [(0.0, self._vindex[source], source)]
        while heap:
            d, _, v = heapq.heappop(heap)
            if v in done:
                continue
            done.add(v)
            for w, length, eid in self._adj[v]:
                nd = d + length
                if w not in dist or nd < dist[w]:
                    dist[w] = nd
                    pred[w] = (v, eid)
                    heapq.heappush(heap, (nd, self._vindex[w], w))
        self._trees[source] = (dist, pred)
        return dist, pred

    def vertex_distance(self, u: str, v: str) -> float:
        return self._tree(u)[0][v]

    def vertex_distance_matrix(self) -> np.ndarray:
        """Dense all-pairs vertex distance matrix, row/col in id order."""
        if self._dmat is None:
            n = len(self._vertices)
            mat = np.zeros((n, n), dtype=float)
            for i, v in enumerate(self._vertices):
                dist, _ = self._tree(v)
                for w, d in dist.items():
                    mat[i, self._vindex[w]] = d
            self._dmat = mat
        return self._dmat

    def edge_arrays(self) -> tuple[tuple[str, ...], np.ndarray, np.ndarray, np.ndarray]:
        """(edge ids, a-index, b-index, lengths) as parallel arrays."""
        if self._edge_arrays is None:
            ids = self._edge_ids
            a_idx = np.array([self._vindex[self._edges[e][0]] for e in ids], dtype=np.int64)
            b_idx = np.array([self._vindex[self._edges[e][1]] for e in ids], dtype=np.int64)
            lens = np.array([self._edges[e][2] for e in ids], dtype=float)
            self._edge_arrays = (ids, a_idx, b_idx, lens)
        return self._edge_arrays

    def edge_position(self, eid: str) -> int:
        return self._edge_ids.index(eid)

    def vertex_distances(self, p: GraphPoint) -> np.ndarray:
        """Distances from ``p`` to every vertex, in vertex id order."""
        p = self.check_point(p)
        dmat = self.vertex_distance_matrix()
        if p.is_vertex:
            return dmat[self._vindex[p.vertex]].copy()
        a, b, length = self.edge(p.edge)
        return np.minimum(
            p.t * length + dmat[self._vindex[a]],
            (1.0 - p.t) * length + dmat[self._vindex[b]],
        )

    # -- anchors: the endpoint-route representation of a point -----------

    def _anchors(self, p: GraphPoint) -> list[tuple[str, float, float | None]]:
        """Ways to leave ``p`` through an edge end.

        Returns records (vertex, cost to reach it, exit parameter on the
        host edge or None for a vertex point).  A self-loop interior point
        yields both ends of the same vertex with different costs.
        """
        if p.is_vertex:
            return [(p.vertex, 0.0, None)]
        a, b, length = self.edge(p.edge)
        return [(a, p.t * length, 0.0), (b, (1.0 - p.t) * length, 1.0)]


def distance(g: MetricGraph, p: GraphPoint, q: GraphPoint) -> float:
    """Shortest-walk distance between two points of the graph."""
    p = g.check_point(p)
    q = g.check_point(q)
    best = math.inf
    if not p.is_vertex and not q.is_vertex and p.edge == q.edge:
        best = abs(p.t - q.t) * g.edge_length(p.edge)
    for u, cu, _ in g._anchors(p):
        du = g._tree(u)[0]
        for v, cv, _ in g._anchors(q):
            cand = cu + du[v] + cv
            if cand < best:
                best = cand
    return best


# -- walks ----------------------------------------------------------------


@dataclass(frozen=True)
class WalkSegment:
    """Directed sub-arc of one edge: traversed from t0 to t1 (edge frame)."""

    edge: str
    t0: float
    t1: float

    @property
    def forward(self) -> bool:
        return self.t1 >= self.t0


@dataclass(frozen=True)
class Walk:
    """A finite walk: a start point plus consecutive edge sub-arcs.

    An empty segment tuple is the constant walk at ``start``.
    """

    start: GraphPoint
    segments: tuple[WalkSegment, ...] = ()


def walk_length(g: MetricGraph, w: Walk) -> float:
    return sum(abs(s.t1 - s.t0) * g.edge_length(s.edge) for s in w.segments)


def walk_end(g: MetricGraph, w: Walk) -> GraphPoint:
    if not w.segments:
        return g.check_point(w.start)
    last = w.segments[-1]
    return g.point(last.edge, last.t1)


def _seg_start_point(g: MetricGraph, s: WalkSegment) -> GraphPoint:
    return g.point(s.edge, s.t0)


def validate_walk(g: MetricGraph, w: Walk) -> Walk:
    """Check segment ranges and endpoint chaining; returns ``w``."""
    cur = g.check_point(w.start)
    for s in w.segments:
        g.edge(s.edge)
        for t in (s.t0, s.t1):
            if t < -PARAM_SNAP or t > 1.0 + PARAM_SNAP:
                raise InputError(f"segment parameter {t!r} outside [0, 1]")
        here = _seg_start_point(g, s)
        if not g.points_equal(cur, here):
            raise InputError(f"walk breaks: segment on {s.edge!r} starts at {here}, expected {cur}")
        cur = g.point(s.edge, s.t1)
    return w


def normalize_walk(g: MetricGraph, w: Walk) -> Walk:
    """Canonical form: zero-length segments dropped, same-direction runs
    on one edge merged.  Two walks agree under common subdivision iff their
    normal forms agree segment-by-segment within tolerance."""
    start = g.check_point(w.start)
    segs: list[list] = []
    for s in w.segments:
        t0, t1 = float(s.t0), float(s.t1)
        if abs(t1 - t0) <= PARAM_SNAP:
            continue
        if segs:
            prev = segs[-1]
            if (
                prev[0] == s.edge
                and abs(prev[2] - t0) <= REL_TOL
                and (prev[2] - prev[1]) * (t1 - t0) > 0
            ):
                prev[2] = t1
                continue
        segs.append([s.edge, t0, t1])
    return Walk(start, tuple(WalkSegment(e, t0, t1) for e, t0, t1 in segs))


def walks_equal(g: MetricGraph, w1: Walk, w2: Walk) -> bool:
    """Equality of walks under common subdivision (via normal forms)."""
    a = normalize_walk(g, w1)
    b = normalize_walk(g, w2)
    if not g.points_equal(a.start, b.start):
        return False
    if len(a.segments) != len(b.segments):
        return False
    for s, t in zip(a.segments, b.segments):
        if s.edge != t.edge:
            return False
        if abs(s.t0 - t.t0) > REL_TOL or abs(s.t1 - t.t1) > REL_TOL:
            return False
    return True


def reverse_walk(g: MetricGraph, w: Walk) -> Walk:
    segs = tuple(WalkSegment(s.edge, s.t1, s.t0) for s in reversed(w.segments))
    return Walk(walk_end(g, w), segs)


def concat_walks(g: MetricGraph, w1: Walk, w2: Walk) -> Walk:
    if not g.points_equal(walk_end(g, w1), w2.start):
        raise InputError("walks do not chain: end of first != start of second")
    return normalize_walk(g, Walk(w1.start, w1.segments + w2.segments))


def walk_point_at(g: MetricGraph, w: Walk, arc: float) -> GraphPoint:
    """Point at arc-length position ``arc`` along the walk (clamped)."""
    if arc <= 0 or not w.segments:
        return g.check_point(w.start)
    acc = 0.0
    for s in w.segments:
        ell = g.edge_length(s.edge)
        seg_len = abs(s.t1 - s.t0) * ell
        if arc <= acc + seg_len or s is w.segments[-1]:
            frac = min(max((arc - acc) / seg_len, 0.0), 1.0) if seg_len > 0 else 0.0
            return g.point(s.edge, s.t0 + (s.t1 - s.t0) * frac)
        acc += seg_len
    return walk_end(g, w)


def walk_max_distance_from(g: MetricGraph, w: Walk, p: GraphPoint) -> float:
    """max over points of the walk of their distance to ``p``: exact.

    Distance restricted to an edge is piecewise linear in the parameter,
    so the maximum over each segment is attained at an endpoint or at a
    crossing of two of the affine pieces; all candidates are evaluated.
    """
    p = g.check_point(p)
    best = distance(g, p, w.start)
    for s in w.segments:
        a, b, ell = g.edge(s.edge)
        da = distance(g, p, g.vertex_point(a))
        db = distance(g, p, g.vertex_point(b))
        lo, hi = min(s.t0, s.t1), max(s.t0, s.t1)
        cands = {lo, hi}
        # peak of min(da + t*ell, db + (1-t)*ell)
        cands.add((db - da + ell) / (2.0 * ell))
        if not p.is_vertex and p.edge == s.edge:
            tc = p.t
            cands.add(tc)
            # crossings of the direct arms with the endpoint pieces
            cands.add((db + ell * (1.0 + tc)) / (2.0 * ell))
            cands.add((tc * ell - da) / (2.0 * ell))
        for t in cands:
            t = min(max(t, lo), hi)
            d = distance(g, p, g.point(s.edge, t))
            if d > best:
                best = d
    return best


def shortest_walk(g: MetricGraph, p: GraphPoint, q: GraphPoint) -> Walk:
    """One geodesic walk from p to q (deterministic choice).

    Realizes the distance: candidates are the direct same-edge arc and,
    for each pair of edge ends, the partial exit arc + a shortest vertex
    path + the partial entry arc.
    """
    p = g.check_point(p)
    q = g.check_point(q)
    best_cost = math.inf
    best: Walk | None = None

    if not p.is_vertex and not q.is_vertex and p.edge == q.edge:
        best_cost = abs(p.t - q.t) * g.edge_length(p.edge)
        if abs(p.t - q.t) <= PARAM_SNAP:
            best = Walk(p, ())
        else:
            best = Walk(p, (WalkSegment(p.edge, p.t, q.t),))
    elif g.points_equal(p, q):
        return Walk(p, ())

    for u, cu, exit_t in g._anchors(p):
        dist_u, pred_u = g._tree(u)
        for v, cv, entry_t in g._anchors(q):
            cand = cu + dist_u[v] + cv
            if cand < best_cost - ABS_TOL:
                segs: list[WalkSegment] = []
                if exit_t is not None and abs(p.t - exit_t) > PARAM_SNAP:
                    segs.append(WalkSegment(p.edge, p.t, exit_t))
                # vertex path u -> v from the predecessor tree
                chain: list[WalkSegment] = []
                cur = v
                while cur != u:
                    prev, eid = pred_u[cur]
                    ea, eb, _ = g.edge(eid)
                    if prev == ea and cur == eb:
                        chain.append(WalkSegment(eid, 0.0, 1.0))
                    else:
                        chain.append(WalkSegment(eid, 1.0, 0.0))
                    cur = prev
                segs.extend(reversed(chain))
                if entry_t is not None and abs(q.t - entry_t) > PARAM_SNAP:
                    segs.append(WalkSegment(q.edge, entry_t, q.t))
                best_cost = cand
                best = Walk(p, tuple(segs))
    assert best is not None
    return normalize_walk(g, best)


# -- balls and measure ------------------------------------------------------


@dataclass(frozen=True)
class BallSegment:
    edge: str
    lo: float
    hi: float


@dataclass(frozen=True)
class BallRegion:
    """Closed metric ball as per-edge parameter intervals.

    Segments are maximal and pairwise non-overlapping (up to sets of
    measure zero); ``volume`` is the total length covered.
    """

    center: GraphPoint
    radius: float
    segments: tuple[BallSegment, ...]
    volume: float


def ball(g: MetricGraph, center: GraphPoint, r: float) -> BallRegion:
    """Closed ball of radius r; exact, piecewise linear in r.

    Distance from the center to a point of an edge is the minimum of at
    most four affine functions of the parameter (entry through either end,
    plus the two direct arms when the center lies on that edge), so the
    sublevel set on each edge is a union of at most a few intervals.
    """
    center = g.check_point(center)
    r = float(r)
    if r < 0:
        raise NonpositiveRadius(f"ball radius must be nonnegative, got {r!r}")
    segs: list[BallSegment] = []
    volume = 0.0
    if r == 0.0:
        return BallRegion(center, r, (), 0.0)
    for eid in g.edge_ids:
        a, b, ell = g.edge(eid)
        da = distance(g, center, g.vertex_point(a))
        db = distance(g, center, g.vertex_point(b))
        # affine pieces (c0, c1): distance candidate c0 + c1*t
        pieces = [(da, ell), (db + ell, -ell)]
        intervals: list[tuple[float, float]] = []
        if not center.is_vertex and center.edge == eid:
            # direct arc |t - tc|*ell <= r: one interval around the center
            tc = center.t
            lo, hi = max(0.0, tc - r / ell), min(1.0, tc + r / ell)
            if hi > lo:
                intervals.append((lo, hi))
        for c0, c1 in pieces:
            if c1 > 0:
                x = (r - c0) / c1
                if x > 0:
                    intervals.append((0.0, min(1.0, x)))
            else:
                x = (r - c0) / c1
                if x < 1.0:
                    intervals.append((max(0.0, x), 1.0))
        intervals.sort()
        merged: list[list[float]] = []
        for lo, hi in intervals:
            if hi - lo <= PARAM_SNAP:
                continue
            if merged and lo <= merged[-1][1] + PARAM_SNAP:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        for lo, hi in merged:
            segs.append(BallSegment(eid, lo, hi))
            volume += (hi - lo) * ell
    return BallRegion(center, r, tuple(segs), volume)


def ahlfors_constant(
    g: MetricGraph,
    q: float,
    radii: Sequence[float],
    sample_points: Sequence[GraphPoint],
) -> float:
    """Smallest C witnessed on the samples for the q-regularity sandwich
    C^-1 r^q <= vol(B(x, r)) <= C r^q.

    Returns the max over samples and radii of max(r^q/vol, vol/r^q);
    always >= 1.
    """
    if not math.isfinite(q) or q <= 0:
        raise InputError(f"regularity exponent must be positive, got {q!r}")
    samples = list(sample_points)
    if not samples:
        raise EmptySampleSet("no sample points for regularity estimate")
    rlist = [float(r) for r in radii]
    if not rlist:
        raise EmptySampleSet("no radii for regularity estimate")
    for r in rlist:
        if not math.isfinite(r) or r <= 0:
            raise NonpositiveRadius(f"radii must be positive, got {r!r}")
    # vectorized sublevel volumes: on every edge the distance from x is
    # min(da + s, db + (len - s)), whose sublevel length is
    # min(len, relu(r - da) + relu(r - db)); the host edge of an interior
    # sample adds the direct arc and is redone by interval merge
    _, a_idx, b_idx, lens = g.edge_arrays()
    rarr = np.array(rlist)
    rq = rarr ** q
    c = 1.0
    for x in samples:
        x = g.check_point(x)
        dv = g.vertex_distances(x)
        da = dv[a_idx][None, :]
        db = dv[b_idx][None, :]
        r = rarr[:, None]
        per_edge = np.minimum(lens[None, :], np.maximum(r - da, 0.0) + np.maximum(r - db, 0.0))
        vols = per_edge.sum(axis=1)
        if not x.is_vertex:
            k = g.edge_position(x.edge)
            for i, rr in enumerate(rlist):
                vols[i] += _host_edge_sublevel(
                    float(da[0, k]), float(db[0, k]), float(lens[k]), x.t, rr
                ) - per_edge[i, k]
        c = max(c, float(np.max(rq / vols)), float(np.max(vols / rq)))
    return c


def _host_edge_sublevel(da: float, db: float, ell: float, tc: float, r: float) -> float:
    """Sublevel length on the sample's own edge: the two end intervals
    plus the direct arc around parameter tc, merged."""
    intervals = []
    x = (r - da) / ell
    if x > 0:
        intervals.append((0.0, min(1.0, x)))
    y = (r - db) / ell
    if y > 0:
        intervals.append((max(0.0, 1.0 - y), 1.0))
    lo, hi = max(0.0, tc - r / ell), min(1.0, tc + r / ell)
    if hi > lo:
        intervals.append((lo, hi))
    intervals.sort()
    total = 0.0
    cur_lo, cur_hi = -1.0, -1.0
    for lo, hi in intervals:
        if lo > cur_hi:
            total += cur_hi - cur_lo if cur_hi > cur_lo else 0.0
            cur_lo, cur_hi = lo, hi
        else:
            cur_hi = max(cur_hi, hi)
    if cur_hi > cur_lo:
        total += cur_hi - cur_lo
    return total * ell


def cycle_rank(g: MetricGraph) -> int:
    """|E| - |V| + 1 for a connected graph; 0 iff the graph is a tree."""
    return len(g.edge_ids) - len(g.vertex_ids) + 1


def subdivide_edge(
    g: MetricGraph,
    eid: str,
    t: float,
    new_vertex: str | None = None,
    new_edges: tuple[str, str] | None = None,
) -> MetricGraph:
    """Split edge ``eid`` at parameter t into two edges through a new vertex."""
    a, b, ell = g.edge(eid)
    if not 0.0 < t < 1.0:
        raise InputError(f"subdivision parameter must be interior, got {t!r}")
    v = new_vertex if new_vertex is not None else f"{eid}/v"
    e1, e2 = new_edges if new_edges is not None else (f"{eid}/1", f"{eid}/2")
    if g.has_vertex(v):
        raise InputError(f"subdivision vertex {v!r} already exists")
    edges = [(x, *g.edge(x)) for x in g.edge_ids if x != eid]
    for fresh in (e1, e2):
        if any(fresh == rec[0] for rec in edges):
            raise InputError(f"subdivision edge id {fresh!r} already exists")
    edges.append((e1, a, v, t * ell))
    edges.append((e2, v, b, (1.0 - t) * ell))
    return MetricGraph(list(g.vertex_ids) + [v], edges, g.boundary)
