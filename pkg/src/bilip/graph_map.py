"""Maps between metric graphs: vertices to vertices, edges to edge walks.

A map sends every domain edge, at constant speed, across a nonempty walk of
whole codomain edges.  This module verifies the structural invariants
(continuity, no backtracking, finite stretch), measures the local
bilipschitz constant on a subdivision net, certifies the two ball
inclusions that make the map a Lipschitz quotient, and enumerates fibers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptySampleSet,
    InputError,
    NonImmersedEdge,
    NonpositiveRadius,
    NotLocallyInjective,
    PointNotOnGraph,
)
from .metric_graph import (
    ABS_TOL,
    REL_TOL,
    GraphPoint,
    MetricGraph,
    Walk,
    WalkSegment,
    ball,
    distance,
    normalize_walk,
    shortest_walk,
    subdivide_edge,
    tol,
    walk_max_distance_from,
)
from .nets import PointSet, net_on_graph, net_on_segments, pairwise_distances, distances_to_point, points_on_edges


def _parse_token(token) -> tuple[str, int]:
    if isinstance(token, tuple):
        eid, sgn = token
        if sgn not in (1, -1):
            raise InputError(f"edge walk direction must be +1/-1, got {sgn!r}")
        return str(eid), int(sgn)
    if isinstance(token, str):
        if token.startswith("~"):
            return token[1:], -1
        return token, 1
    raise InputError(f"bad edge walk token {token!r}")


class GraphMap:
    """A simplicial-style map: ``vertex_map`` on vertices, ``edge_map``
    assigning each domain edge a walk of signed codomain edges ("~e" or
    (e, -1) means e traversed backwards).  Interior points travel along the
    image walk at constant speed."""

    def __init__(
        self,
        domain: MetricGraph,
        codomain: MetricGraph,
        vertex_map: dict[str, str],
        edge_map: dict,
    ):
        self.domain = domain
        self.codomain = codomain
        vm = dict(vertex_map)
        for v in domain.vertex_ids:
            if v not in vm:
                raise InputError(f"vertex_map is missing domain vertex {v!r}")
            if not codomain.has_vertex(vm[v]):
                raise InputError(f"vertex_map sends {v!r} to unknown vertex {vm[v]!r}")
        extra = set(vm) - set(domain.vertex_ids)
        if extra:
            raise InputError(f"vertex_map mentions unknown vertices {sorted(extra)}")
        self.vertex_map = vm

        em: dict[str, tuple[tuple[str, int], ...]] = {}
        for e in domain.edge_ids:
            if e not in edge_map:
                raise InputError(f"edge_map is missing domain edge {e!r}")
            walk = tuple(_parse_token(tk) for tk in edge_map[e])
            if not walk:
                raise InputError(f"edge_map of {e!r} is empty; edges cannot collapse")
            for f, _ in walk:
                codomain.edge(f)
            em[e] = walk
        extra = set(edge_map) - set(domain.edge_ids)
        if extra:
            raise InputError(f"edge_map mentions unknown edges {sorted(extra)}")
        self.edge_map = em

        # slot tables: per edge, oriented from end 0
        self._cum: dict[str, np.ndarray] = {}
        self._slot_edge_pos: dict[str, np.ndarray] = {}
        self._slot_dir: dict[str, np.ndarray] = {}
        cod_pos = {f: i for i, f in enumerate(codomain.edge_ids)}
        for e, walk in em.items():
            lens = np.array([codomain.edge_length(f) for f, _ in walk])
            cum = np.concatenate([[0.0], np.cumsum(lens)])
            self._cum[e] = cum
            self._slot_edge_pos[e] = np.array([cod_pos[f] for f, _ in walk], dtype=np.int64)
            self._slot_dir[e] = np.array([s for _, s in walk], dtype=np.int8)
        self._germ_tables: dict[str, dict] | None = None
        self._germ_collisions: list[tuple[str, tuple, tuple]] | None = None

    # -- basic geometry ---------------------------------------------------

    def image_length(self, e: str) -> float:
        return float(self._cum[e][-1])

    def stretch(self, e: str) -> float:
        return self.image_length(e) / self.domain.edge_length(e)

    def max_stretch(self) -> float:
        return max(self.stretch(e) for e in self.domain.edge_ids)

    def r0_default(self) -> float:
        """Half the shortest codomain edge, divided by the largest stretch."""
        shortest = min(self.codomain.edge_length(f) for f in self.codomain.edge_ids)
        return 0.5 * shortest / self.max_stretch()

    def vertex_image(self, v: str) -> str:
        try:
            return self.vertex_map[v]
        except KeyError:
            raise PointNotOnGraph(f"unknown domain vertex {v!r}")

    def point_image(self, p: GraphPoint) -> GraphPoint:
        p = self.domain.check_point(p)
        if p.is_vertex:
            return self.codomain.vertex_point(self.vertex_image(p.vertex))
        e = p.edge
        cum = self._cum[e]
        w = p.t * cum[-1]
        i = min(max(int(np.searchsorted(cum, w, side="right")) - 1, 0), len(cum) - 2)
        delta = w - cum[i]
        f, sgn = self.edge_map[e][i]
        ell = self.codomain.edge_length(f)
        s = delta if sgn > 0 else ell - delta
        return self.codomain.point(f, min(max(s / ell, 0.0), 1.0))

    def _arc_image(self, e: str, w0: float, w1: float) -> list[WalkSegment]:
        """Image of the arc of edge ``e`` between walk-arc positions w0, w1."""
        cum = self._cum[e]
        walk = self.edge_map[e]
        out: list[WalkSegment] = []
        if abs(w1 - w0) <= ABS_TOL:
            return out
        sign = 1 if w1 > w0 else -1
        lo, hi = (w0, w1) if sign > 0 else (w1, w0)
        i0 = min(max(int(np.searchsorted(cum, lo, side="right")) - 1, 0), len(walk) - 1)
        i1 = min(max(int(np.searchsorted(cum, hi, side="left")) - 1, 0), len(walk) - 1)
        idx = range(i0, i1 + 1) if sign > 0 else range(i1, i0 - 1, -1)
        for i in idx:
            f, sgn = walk[i]
            ell = self.codomain.edge_length(f)
            a = max(lo, cum[i]) - cum[i]
            b = min(hi, cum[i + 1]) - cum[i]
            if b - a <= ABS_TOL:
                continue
            if sgn > 0:
                ta, tb = a / ell, b / ell
            else:
                ta, tb = 1.0 - a / ell, 1.0 - b / ell
            if sign < 0:
                ta, tb = tb, ta
            out.append(WalkSegment(f, ta, tb))
        return out

    def walk_image(self, w: Walk) -> Walk:
        """Image walk of a domain walk (normalized)."""
        segs: list[WalkSegment] = []
        for s in w.segments:
            cum = self._cum[s.edge]
            segs.extend(self._arc_image(s.edge, s.t0 * cum[-1], s.t1 * cum[-1]))
        return normalize_walk(self.codomain, Walk(self.point_image(w.start), tuple(segs)))

    # -- germs ------------------------------------------------------------

    def germ_image(self, e: str, end: int) -> tuple[str, int]:
        """Outgoing codomain germ of the domain germ (edge e, entering at end)."""
        walk = self.edge_map[e]
        if end == 0:
            f, sgn = walk[0]
            return (f, 0 if sgn > 0 else 1)
        f, sgn = walk[-1]
        return (f, 1 if sgn > 0 else 0)

    def _build_germ_tables(self) -> None:
        if self._germ_tables is not None:
            return
        tables: dict[str, dict] = {}
        collisions: list[tuple[str, tuple, tuple]] = []
        for v in self.domain.vertex_ids:
            table: dict[tuple[str, int], tuple[str, int]] = {}
            for e, end in self.domain.germs(v):
                img = self.germ_image(e, end)
                if img in table:
                    collisions.append((v, table[img], (e, end)))
                else:
                    table[img] = (e, end)
            tables[v] = table
        self._germ_tables = tables
        self._germ_collisions = collisions

    def germ_table(self, v: str) -> dict[tuple[str, int], tuple[str, int]]:
        self._build_germ_tables()
        return self._germ_tables[v]

    def image_pointset(self, pts: PointSet) -> PointSet:
        """Images of a domain PointSet, as a codomain PointSet (vectorized)."""
        assert pts.graph is self.domain
        _, cod_a, cod_b, cod_lens = self.codomain.edge_arrays()
        n = len(pts)
        out_pos = np.zeros(n, dtype=np.int64)
        out_t = np.zeros(n, dtype=float)
        dom_ids = self.domain.edge_ids
        for k in np.unique(pts.edge_idx):
            mask = pts.edge_idx == k
            e = dom_ids[int(k)]
            cum = self._cum[e]
            w = pts.t[mask] * cum[-1]
            i = np.clip(np.searchsorted(cum, w, side="right") - 1, 0, len(cum) - 2)
            delta = w - cum[i]
            fpos = self._slot_edge_pos[e][i]
            sgn = self._slot_dir[e][i]
            ell = cod_lens[fpos]
            s = np.where(sgn > 0, delta, ell - delta)
            out_pos[mask] = fpos
            out_t[mask] = np.clip(s / ell, 0.0, 1.0)
        return points_on_edges(self.codomain, out_pos, out_t)


@dataclass(frozen=True)
class MapViolation:
    kind: str       # "continuity" | "backtrack" | "stretch"
    edge: str
    detail: str


def _slot_endpoints(g: MetricGraph, f: str, sgn: int) -> tuple[str, str]:
    a, b, _ = g.edge(f)
    return (a, b) if sgn > 0 else (b, a)


def verify_map(m: GraphMap) -> tuple[MapViolation, ...]:
    """Structural invariants as data: continuity of each edge walk with the
    vertex images, no immediate backtracking, finite positive stretch."""
    out: list[MapViolation] = []
    for e in m.domain.edge_ids:
        a, b, _ = m.domain.edge(e)
        walk = m.edge_map[e]
        cur = m.vertex_map[a]
        for i, (f, sgn) in enumerate(walk):
            fa, fb = _slot_endpoints(m.codomain, f, sgn)
            if fa != cur:
                out.append(MapViolation("continuity", e, f"slot {i} starts at {fa!r}, expected {cur!r}"))
            cur = fb
            if i + 1 < len(walk):
                nf, nsgn = walk[i + 1]
                if nf == f and nsgn == -sgn:
                    out.append(MapViolation("backtrack", e, f"slots {i},{i+1} traverse {f!r} out and back"))
        if cur != m.vertex_map[b]:
            out.append(MapViolation("continuity", e, f"walk ends at {cur!r}, expected {m.vertex_map[b]!r}"))
        if not math.isfinite(m.stretch(e)) or m.stretch(e) <= 0:
            out.append(MapViolation("stretch", e, f"stretch {m.stretch(e)!r}"))
    return tuple(out)


def is_immersion(m: GraphMap) -> bool:
    return not any(v.kind == "backtrack" for v in verify_map(m))


def local_injectivity(m: GraphMap) -> str | None:
    """None if edge-germs at every vertex map to pairwise distinct germs;
    otherwise the first vertex where two germs collide."""
    m._build_germ_tables()
    if m._germ_collisions:
        return m._germ_collisions[0][0]
    return None


@dataclass(frozen=True)
class LocalBilipschitzReport:
    L: float
    r0: float
    mesh: float
    witness_upper: tuple[GraphPoint, GraphPoint, float] | None
    witness_lower: tuple[GraphPoint, GraphPoint, float] | None
    pair_count: int


def _germ_collision_witness(m: GraphMap, v: str) -> tuple[GraphPoint, GraphPoint, float]:
    """An exact collision pair near a vertex with colliding germs."""
    _, g1, g2 = next(c for c in m._germ_collisions if c[0] == v)
    pts = []
    delta = None
    for (e, end) in (g1, g2):
        lam = m.image_length(e)
        first = m.codomain.edge_length(m.edge_map[e][0 if end == 0 else -1][0])
        step = 0.25 * min(first, lam)
        delta = step if delta is None else min(delta, step)
    for (e, end) in (g1, g2):
        lam = m.image_length(e)
        t = delta / lam if end == 0 else 1.0 - delta / lam
        pts.append(m.domain.point(e, t))
    d = distance(m.domain, pts[0], pts[1])
    return pts[0], pts[1], d


def local_bilipschitz_constant(
    m: GraphMap,
    r_0: float,
    mesh: float | None = None,
) -> LocalBilipschitzReport:
    """Largest distortion ratio over net pairs lying in a common r_0 ball.

    The net is every vertex plus subdivision points at spacing <= mesh
    (default r_0/16; mesh must be <= r_0/4).  The pair set is realized as
    all net pairs at distance <= 2*r_0: a geodesic midpoint argument makes
    this the common-ball criterion up to O(mesh).  Each pair's distances
    are exact; only the pair sampling is mesh-limited.

    Raises NotLocallyInjective when germs collide at a vertex or when a
    pair at definite distance maps within tolerance.
    """
    if r_0 <= 0:
        raise NonpositiveRadius(f"r_0 must be positive, got {r_0!r}")
    if mesh is None:
        mesh = r_0 / 16.0
    if not 0 < mesh <= r_0 / 4.0 + ABS_TOL:
        raise InputError(f"mesh must be in (0, r_0/4], got {mesh!r}")

    v = local_injectivity(m)
    if v is not None:
        p, q, d = _germ_collision_witness(m, v)
        raise NotLocallyInjective(p, q, d, distance(m.codomain, m.point_image(p), m.point_image(q)))

    net, spans = net_on_graph(m.domain, mesh)
    image = m.image_pointset(net)
    dom_ids = m.domain.edge_ids
    _, a_idx, b_idx, _ = m.domain.edge_arrays()
    dv = m.domain.vertex_distance_matrix()

    # strict: p, q share an open ball iff d(p, q) < 2 r_0 (geodesic midpoint)
    cap = 2.0 * r_0 * (1.0 - REL_TOL)
    lb_cap = 2.0 * r_0 * (1.0 + REL_TOL)
    div_dom = 1e-6 * r_0
    div_img = 1e-9 * r_0
    best_up = 0.0
    best_lo = 0.0
    wit_up = None
    wit_lo = None
    pairs = 0

    ne = len(dom_ids)
    for i in range(ne):
        for j in range(i, ne):
            lb = min(
                dv[a_idx[i], a_idx[j]],
                dv[a_idx[i], b_idx[j]],
                dv[b_idx[i], a_idx[j]],
                dv[b_idx[i], b_idx[j]],
            )
            if i != j and lb > lb_cap:
                continue
            A = net.take(spans[i])
            B = net.take(spans[j])
            d = pairwise_distances(A, B)
            if i == j:
                iu = np.triu_indices(len(A), k=1)
                d_flat = d[iu]
                dp_flat = pairwise_distances(image.take(spans[i]), image.take(spans[j]))[iu]
                rows, cols = iu
            else:
                d_flat = d.ravel()
                dp_flat = pairwise_distances(image.take(spans[i]), image.take(spans[j])).ravel()
                rows, cols = np.divmod(np.arange(d.size), d.shape[1])
            sel = (d_flat < cap) & (d_flat > ABS_TOL)
            if not sel.any():
                continue
            d_flat = d_flat[sel]
            dp_flat = dp_flat[sel]
            rows = rows[sel]
            cols = cols[sel]
            pairs += len(d_flat)

            diverged = (d_flat >= div_dom) & (dp_flat <= div_img)
            if diverged.any():
                k = int(np.argmax(diverged))
                p = net.graph_point(spans[i].start + rows[k])
                q = net.graph_point(spans[j].start + cols[k])
                raise NotLocallyInjective(p, q, float(d_flat[k]), float(dp_flat[k]))

            ok = dp_flat > ABS_TOL
            if not ok.any():
                continue
            up = dp_flat[ok] / d_flat[ok]
            lo = d_flat[ok] / dp_flat[ok]
            ku = int(np.argmax(up))
            kl = int(np.argmax(lo))
            okidx = np.flatnonzero(ok)
            if up[ku] > best_up:
                best_up = float(up[ku])
                k = okidx[ku]
                wit_up = (
                    net.graph_point(spans[i].start + rows[k]),
                    net.graph_point(spans[j].start + cols[k]),
                    best_up,
                )
            if lo[kl] > best_lo:
                best_lo = float(lo[kl])
                k = okidx[kl]
                wit_lo = (
                    net.graph_point(spans[i].start + rows[k]),
                    net.graph_point(spans[j].start + cols[k]),
                    best_lo,
                )
    L = max(best_up, best_lo, 1.0)
    return LocalBilipschitzReport(L, r_0, mesh, wit_up, wit_lo, pairs)


@dataclass(frozen=True)
class LqViolation:
    center: GraphPoint
    radius: float
    inclusion: str        # "outer" | "inner"
    witness: GraphPoint
    detail: str


def lq_verify(m: GraphMap, L: float, sample_points, radii) -> LqViolation | None:
    """Certify the quotient sandwich  B(Ux, r/L) <= U(B(x, r)) <= B(Ux, L r).

    Outer inclusion: every net point of B(x, r) must map within L*r of Ux
    (net spacing r/16).  Inner inclusion is constructive: every net point z
    of B(Ux, r/L) (spacing r/(8L)) must be the endpoint of the lifted
    geodesic from Ux to z, with the lift staying inside B(x, r).  Lifting
    failures propagate.  Returns the first violation, or None.
    """
    from .lifting import lift_path

    if L < 1.0:
        raise InputError(f"quotient constant must be >= 1, got {L!r}")
    samples = list(sample_points)
    if not samples:
        raise EmptySampleSet("no sample points for quotient check")
    rlist = [float(r) for r in radii]
    if not rlist:
        raise EmptySampleSet("no radii for quotient check")
    for r in rlist:
        if r <= 0:
            raise NonpositiveRadius(f"radii must be positive, got {r!r}")

    for x0 in samples:
        x0 = m.domain.check_point(x0)
        ux0 = m.point_image(x0)
        for r in rlist:
            breg = ball(m.domain, x0, r)
            net = net_on_segments(m.domain, breg.segments, r / 16.0)
            if len(net):
                dimg = distances_to_point(m.image_pointset(net), ux0)
                bad = dimg > L * r + tol(L * r)
                if bad.any():
                    k = int(np.argmax(dimg))
                    return LqViolation(
                        x0, r, "outer", net.graph_point(k),
                        f"image point at distance {float(dimg[k]):.12g} > L*r = {L * r:.12g}",
                    )
            creg = ball(m.codomain, ux0, r / L)
            cnet = net_on_segments(m.codomain, creg.segments, r / (8.0 * L))
            for k in range(len(cnet)):
                z = cnet.graph_point(k)
                if m.codomain.points_equal(z, ux0):
                    continue
                geo = shortest_walk(m.codomain, ux0, z)
                lifted = lift_path(m, geo, x0)
                reach = walk_max_distance_from(m.domain, lifted, x0)
                if reach > r + tol(r):
                    return LqViolation(
                        x0, r, "inner", z,
                        f"lift wanders to distance {reach:.12g} > r = {r:.12g}",
                    )
    return None


# -- fibers -----------------------------------------------------------------


def _require_immersion(m: GraphMap) -> None:
    for e in m.domain.edge_ids:
        walk = m.edge_map[e]
        for i in range(len(walk) - 1):
            f, sgn = walk[i]
            nf, nsgn = walk[i + 1]
            if nf == f and nsgn == -sgn:
                raise NonImmersedEdge(e, i)


def fiber(m: GraphMap, y: GraphPoint) -> tuple[GraphPoint, ...]:
    """All preimages of ``y``, by exact per-edge affine inversion.

    Solutions within parameter 1e-9 on one edge are merged; edge-end hits
    normalize to vertices and are deduplicated against vertex preimages.
    """
    _require_immersion(m)
    y = m.codomain.check_point(y)
    verts: set[str] = set()
    interior: list[tuple[str, float]] = []
    if y.is_vertex:
        for v in m.domain.vertex_ids:
            if m.vertex_map[v] == y.vertex:
                verts.add(v)
        for e in m.domain.edge_ids:
            walk = m.edge_map[e]
            cum = m._cum[e]
            for i in range(1, len(walk)):
                f, sgn = walk[i - 1]
                _, vb = _slot_endpoints(m.codomain, f, sgn)
                if vb == y.vertex:
                    interior.append((e, float(cum[i] / cum[-1])))
    else:
        fpos = y.edge
        ell = m.codomain.edge_length(fpos)
        s_y = y.t * ell
        for e in m.domain.edge_ids:
            walk = m.edge_map[e]
            cum = m._cum[e]
            for i, (f, sgn) in enumerate(walk):
                if f != fpos:
                    continue
                delta = s_y if sgn > 0 else ell - s_y
                t = (cum[i] + delta) / cum[-1]
                interior.append((e, float(t)))
    merged: list[tuple[str, float]] = []
    for e, t in sorted(interior):
        if merged and merged[-1][0] == e and abs(merged[-1][1] - t) <= REL_TOL:
            continue
        merged.append((e, t))
    pts = [m.domain.vertex_point(v) for v in sorted(verts)]
    pts.extend(m.domain.point(e, t) for e, t in merged)
    return tuple(pts)


def multiplicity(m: GraphMap, y: GraphPoint) -> int:
    """Number of preimages of ``y``."""
    return len(fiber(m, y))


def max_multiplicity_in_ball(
    m: GraphMap,
    x0: GraphPoint,
    R: float,
    extra_samples=(),
) -> tuple[int, GraphPoint]:
    """Max fiber count inside the open ball B(x0, R), sampled at codomain
    vertices (plus any extra sample points); returns (count, arg point).

    Membership is strict: preimages at distance exactly R do not count.
    """
    if R <= 0:
        raise NonpositiveRadius(f"ball radius must be positive, got {R!r}")
    x0 = m.domain.check_point(x0)
    cut = R * (1.0 - REL_TOL)
    samples = [m.codomain.vertex_point(v) for v in m.codomain.vertex_ids]
    samples.extend(m.codomain.check_point(p) for p in extra_samples)
    best = -1
    arg = samples[0]
    for y in samples:
        n = sum(1 for a in fiber(m, y) if distance(m.domain, x0, a) < cut)
        if n > best:
            best = n
            arg = y
    return best, arg


def multiplicity_bound(L: float, C: float, q: float) -> float:
    """Nominal packing bound 2 L^2 C^2 on fiber counts in a ball.

    The exponent q enters the regularity constants, not the bound's shape,
    so it is validated but unused.
    """
    if L < 1 or C < 1:
        raise InputError("bound needs L >= 1 and C >= 1")
    if q <= 0:
        raise InputError(f"regularity exponent must be positive, got {q!r}")
    return 2.0 * L * L * C * C


# -- subdivision (used by invariance tests) ---------------------------------


def subdivide_codomain_edge(m: GraphMap, f: str, t: float) -> GraphMap:
    """Subdivide codomain edge f at parameter t; rewrite all image walks."""
    cod = subdivide_edge(m.codomain, f, t)
    e1, e2 = f"{f}/1", f"{f}/2"
    new_em: dict[str, list] = {}
    for e, walk in m.edge_map.items():
        toks: list[tuple[str, int]] = []
        for g, sgn in walk:
            if g == f:
                toks.extend([(e1, sgn), (e2, sgn)] if sgn > 0 else [(e2, sgn), (e1, sgn)])
            else:
                toks.append((g, sgn))
        new_em[e] = toks
    return GraphMap(m.domain, cod, m.vertex_map, new_em)


def subdivide_domain_edge(m: GraphMap, e: str, slot: int) -> GraphMap:
    """Split domain edge e at an image-walk slot boundary (1 <= slot < #slots)."""
    walk = m.edge_map[e]
    if not 1 <= slot < len(walk):
        raise InputError(f"slot {slot!r} is not an interior boundary of {e!r}")
    cum = m._cum[e]
    t = float(cum[slot] / cum[-1])
    dom = subdivide_edge(m.domain, e, t)
    f, sgn = walk[slot - 1]
    _, mid = _slot_endpoints(m.codomain, f, sgn)
    vm = dict(m.vertex_map)
    vm[f"{e}/v"] = mid
    em = {k: list(v) for k, v in m.edge_map.items() if k != e}
    em[f"{e}/1"] = list(walk[:slot])
    em[f"{e}/2"] = list(walk[slot:])
    return GraphMap(dom, m.codomain, vm, em)
