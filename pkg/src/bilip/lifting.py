"""Path lifting, fiber transport, and loop contraction.

A locally injective map admits at most one lift of a codomain walk from a
chosen preimage of its start: at every moment the next domain germ is
forced.  ``lift_path`` realizes that uniqueness as a run-by-run state
machine.  On top of it: transporting whole fibers along a walk, reducing
null-homotopic loops by spur moves, re-lifting a loop after every move to
watch the endpoint stay put, and the monodromy argument that turns a
doubled fiber into a certified contradiction witness.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    EscapedDomain,
    InputError,
    LiftCollision,
    MoveLiftFailure,
    NoContinuation,
    NotNullHomotopic,
    StartMismatch,
)
from .graph_map import GraphMap, fiber
from .metric_graph import (
    PARAM_SNAP,
    GraphPoint,
    MetricGraph,
    Walk,
    WalkSegment,
    normalize_walk,
    shortest_walk,
    tol,
    validate_walk,
    walk_end,
    walk_length,
    walks_equal,
)

# lift states: ("v", vertex) | ("mid", edge, slot, w) | ("bnd", edge, slot_boundary)


def _classify(m: GraphMap, e: str, w: float):
    cum = m._cum[e]
    lam = float(cum[-1])
    eps = tol(lam)
    if w <= eps:
        a, _, _ = m.domain.edge(e)
        return ("v", a)
    if w >= lam - eps:
        _, b, _ = m.domain.edge(e)
        return ("v", b)
    j = int(np.argmin(np.abs(cum - w)))
    if 0 < j < len(cum) - 1 and abs(float(cum[j]) - w) <= eps:
        return ("bnd", e, j)
    i = min(max(int(np.searchsorted(cum, w, side="right")) - 1, 0), len(cum) - 2)
    return ("mid", e, i, w)


def _state_point(m: GraphMap, state) -> GraphPoint:
    if state[0] == "v":
        return m.domain.vertex_point(state[1])
    if state[0] == "bnd":
        _, e, j = state
        return m.domain.point(e, float(m._cum[e][j] / m._cum[e][-1]))
    _, e, _, w = state
    return m.domain.point(e, w / float(m._cum[e][-1]))


def _germ_end(s0: float, ell: float) -> int:
    # which end of a codomain edge a run starts from
    return 0 if s0 <= ell - s0 else 1


def lift_path(m: GraphMap, alpha: Walk, start: GraphPoint) -> Walk:
    """The unique lift of the codomain walk ``alpha`` starting at ``start``.

    Raises StartMismatch if ``start`` does not sit over ``alpha.start``,
    NoContinuation when ``alpha`` leaves a point along a germ with no
    preimage germ, and EscapedDomain on arrival at a boundary-marked
    vertex with walk still left to traverse.
    """
    validate_walk(m.codomain, alpha)
    x0 = m.domain.check_point(start)
    if not m.codomain.points_equal(m.point_image(x0), alpha.start):
        raise StartMismatch(
            f"start {x0} maps to {m.point_image(x0)}, walk begins at {alpha.start}"
        )
    alpha = normalize_walk(m.codomain, alpha)
    total = walk_length(m.codomain, alpha)

    runs = []
    for s in alpha.segments:
        ell = m.codomain.edge_length(s.edge)
        runs.append((s.edge, s.t0 * ell, s.t1 * ell, ell))
    suffix = [0.0] * (len(runs) + 1)
    for k in range(len(runs) - 1, -1, -1):
        suffix[k] = suffix[k + 1] + abs(runs[k][2] - runs[k][1])

    if x0.is_vertex:
        state = ("v", x0.vertex)
    else:
        state = _classify(m, x0.edge, x0.t * float(m._cum[x0.edge][-1]))

    segs: list[WalkSegment] = []

    def partial() -> Walk:
        return normalize_walk(m.domain, Walk(x0, tuple(segs)))

    for k, (f, s0, s1, ell) in enumerate(runs):
        R = abs(s1 - s0)
        if R <= PARAM_SNAP:
            continue
        if state[0] == "v":
            v = state[1]
            germ = (f, _germ_end(s0, ell))
            hit = m.germ_table(v).get(germ)
            if hit is None:
                if v in m.domain.boundary:
                    raise EscapedDomain(partial(), suffix[k], v)
                raise NoContinuation(
                    f"no germ at {v!r} maps onto codomain germ {germ}", m.domain.vertex_point(v)
                )
            e, end = hit
            lam = float(m._cum[e][-1])
            w_from = 0.0 if end == 0 else lam
            w_to = R if end == 0 else lam - R
        elif state[0] == "bnd":
            _, e, j = state
            cum = m._cum[e]
            lam = float(cum[-1])
            walk_e = m.edge_map[e]
            g_run = (f, _germ_end(s0, ell))
            fj, sj = walk_e[j]
            g_fwd = (fj, 0 if sj > 0 else 1)
            fj1, sj1 = walk_e[j - 1]
            g_back = (fj1, 1 if sj1 > 0 else 0)
            w_from = float(cum[j])
            if g_run == g_fwd:
                w_to = w_from + R
            elif g_run == g_back:
                w_to = w_from - R
            else:
                raise NoContinuation(
                    f"walk leaves a vertex along germ {g_run} with no "
                    f"preimage germ at an interior point of {e!r}",
                    _state_point(m, state),
                )
        else:
            _, e, i, w = state
            cum = m._cum[e]
            lam = float(cum[-1])
            fi, si = m.edge_map[e][i]
            if fi != f:
                raise InputError(
                    f"walk jumps to edge {f!r} away from a point over {fi!r}"
                )
            s_cur = (w - float(cum[i])) if si > 0 else (float(cum[i]) + ell - w)
            if abs(s_cur - s0) > tol(ell):
                raise InputError(
                    f"walk continues from arc {s0:.12g} on {f!r} but the lift sits over {s_cur:.12g}"
                )
            w_from = w
            w_to = w + (1 if s1 > s0 else -1) * si * R
        if not -tol(lam) <= w_to <= lam + tol(lam):
            raise InputError(f"walk overruns the image of edge {e!r}")
        w_to = min(max(w_to, 0.0), lam)
        segs.append(WalkSegment(e, w_from / lam, w_to / lam))
        state = _classify(m, e, w_to)
        if state[0] == "v" and suffix[k + 1] > tol(total):
            v = state[1]
            if v in m.domain.boundary:
                raise EscapedDomain(partial(), suffix[k + 1], v)
    return partial()


def fiber_transport(m: GraphMap, alpha: Walk) -> tuple[tuple[GraphPoint, GraphPoint], ...]:
    """Lift ``alpha`` from every preimage of its start; return (start, end)
    pairs in fiber order.  Distinct starts must land on distinct ends
    (LiftCollision otherwise); every end lies in the fiber over the walk's
    end, making the transport injective into it."""
    starts = fiber(m, alpha.start)
    if not starts:
        return ()
    pairs = []
    for p in starts:
        lifted = lift_path(m, alpha, p)
        pairs.append((p, walk_end(m.domain, lifted)))
    for i in range(len(pairs)):
        for j in range(i + 1, len(pairs)):
            if m.domain.points_equal(pairs[i][1], pairs[j][1]):
                raise LiftCollision(
                    "two lifts of the same walk meet at their endpoints",
                    pairs[i][0], pairs[j][0],
                )
    end_fiber = fiber(m, walk_end(m.codomain, normalize_walk(m.codomain, alpha)))
    for _, q in pairs:
        if not any(m.domain.points_equal(q, z) for z in end_fiber):
            raise LiftCollision(
                "a lift ends outside the fiber over the walk's end", q, q
            )
    return tuple(pairs)


# -- homotopies by spur moves -------------------------------------------------


@dataclass(frozen=True)
class Subdivide:
    """Split segment ``index`` at edge parameter ``t`` (no geometric change)."""
    index: int
    t: float


@dataclass(frozen=True)
class RemoveSpur:
    """Delete segments ``index`` and ``index+1``: an arc followed by its
    exact reverse."""
    index: int


@dataclass(frozen=True)
class Homotopy:
    start: Walk
    moves: tuple
    end: Walk


def apply_move(g: MetricGraph, walk: Walk, move) -> Walk:
    segs = list(walk.segments)
    if isinstance(move, Subdivide):
        if not 0 <= move.index < len(segs):
            raise InputError(f"subdivide index {move.index} out of range")
        s = segs[move.index]
        lo, hi = min(s.t0, s.t1), max(s.t0, s.t1)
        if not lo - PARAM_SNAP < move.t < hi + PARAM_SNAP:
            raise InputError(f"subdivision point {move.t!r} not inside segment {s}")
        segs[move.index : move.index + 1] = [
            WalkSegment(s.edge, s.t0, move.t),
            WalkSegment(s.edge, move.t, s.t1),
        ]
    elif isinstance(move, RemoveSpur):
        i = move.index
        if not 0 <= i + 1 < len(segs):
            raise InputError(f"spur index {i} out of range")
        a, b = segs[i], segs[i + 1]
        if a.edge != b.edge or abs(a.t1 - b.t0) > PARAM_SNAP or abs(b.t1 - a.t0) > PARAM_SNAP:
            raise InputError(f"segments {a} and {b} are not an exact spur")
        del segs[i : i + 2]
    else:
        raise InputError(f"unknown homotopy move {move!r}")
    return Walk(walk.start, tuple(segs))


def contract_loop(g: MetricGraph, loop: Walk) -> Homotopy:
    """Reduce a closed walk to the constant walk by spur moves.

    Scans for adjacent direction flips on one edge, subdivides the longer
    arm so the spur becomes exact, removes it, and repeats.  The move list
    is the homotopy certificate.  A nonempty reduced walk has no spurs
    left, hence is essential: NotNullHomotopic with that walk as witness.
    """
    validate_walk(g, loop)
    start_walk = normalize_walk(g, loop)
    if not g.points_equal(start_walk.start, walk_end(g, start_walk)):
        raise InputError("loop contraction needs a closed walk")
    segs = list(start_walk.segments)
    moves: list = []

    def flip_at(i: int) -> bool:
        a, b = segs[i], segs[i + 1]
        if a.edge != b.edge:
            return False
        da, db = a.t1 - a.t0, b.t1 - b.t0
        return da * db < 0 and abs(a.t1 - b.t0) <= PARAM_SNAP

    guard = 4 * len(segs) + 16
    while True:
        guard -= 1
        if guard < 0:
            raise RuntimeError("loop contraction failed to terminate")
        hit = next((i for i in range(len(segs) - 1) if flip_at(i)), None)
        if hit is None:
            break
        a, b = segs[hit], segs[hit + 1]
        la, lb = abs(a.t1 - a.t0), abs(b.t1 - b.t0)
        if abs(la - lb) <= PARAM_SNAP:
            mv = RemoveSpur(hit)
        elif la > lb:
            cut = a.t1 - (1 if a.t1 > a.t0 else -1) * lb
            moves.append(Subdivide(hit, cut))
            segs[hit : hit + 1] = [WalkSegment(a.edge, a.t0, cut), WalkSegment(a.edge, cut, a.t1)]
            mv = RemoveSpur(hit + 1)
        else:
            cut = b.t0 + (1 if b.t1 > b.t0 else -1) * la
            moves.append(Subdivide(hit + 1, cut))
            segs[hit + 1 : hit + 2] = [WalkSegment(b.edge, b.t0, cut), WalkSegment(b.edge, cut, b.t1)]
            mv = RemoveSpur(hit)
        moves.append(mv)
        del segs[mv.index : mv.index + 2]

    end_walk = Walk(start_walk.start, tuple(segs))
    if segs:
        raise NotNullHomotopic(end_walk)
    return Homotopy(start_walk, tuple(moves), end_walk)


def lift_homotopy(m: GraphMap, h: Homotopy, start: GraphPoint) -> Walk:
    """Re-lift after every move, insisting the lift's endpoint never moves.

    The spur being removed lifts to a spur, so each move preserves the
    endpoint; a move that shifts it means the chain of forced germs
    differs on the two sides, and MoveLiftFailure pinpoints that move.
    """
    cur = h.start
    lifted = lift_path(m, cur, start)
    anchor = walk_end(m.domain, lifted)
    for mv in h.moves:
        nxt = apply_move(m.codomain, cur, mv)
        nlift = lift_path(m, nxt, start)
        nend = walk_end(m.domain, nlift)
        if not m.domain.points_equal(anchor, nend):
            raise MoveLiftFailure(
                f"lift endpoint moved from {anchor} to {nend} across {mv!r}",
                mv, lifted, nlift,
            )
        cur, lifted = nxt, nlift
    if not walks_equal(m.codomain, cur, h.end):
        raise InputError("homotopy moves do not reproduce its recorded end walk")
    return lifted


@dataclass(frozen=True)
class MonodromyObstruction:
    point: GraphPoint
    preimages: tuple[GraphPoint, GraphPoint]
    failure: Exception


def monodromy_injectivity(m: GraphMap, samples=None) -> MonodromyObstruction | None:
    """Certify injectivity over sample points, or produce an obstruction.

    A point with two preimages p, q yields a loop: the image of a domain
    walk from p to q.  Contracting that loop while lifting from p must
    break somewhere, since the contracted loop lifts to the constant walk
    at p yet the original lift ends at q.  The failing step (or a lifting
    failure on the way) is returned as the obstruction.
    """
    if samples is None:
        samples = [m.codomain.vertex_point(v) for v in m.codomain.vertex_ids]
        samples.extend(m.codomain.point(e, 0.5) for e in m.codomain.edge_ids)
    for y in samples:
        y = m.codomain.check_point(y)
        fb = fiber(m, y)
        if len(fb) < 2:
            continue
        p, q = fb[0], fb[1]
        beta = shortest_walk(m.domain, p, q)
        alpha = m.walk_image(beta)
        try:
            h = contract_loop(m.codomain, alpha)
            lift_homotopy(m, h, p)
        except (MoveLiftFailure, NoContinuation, EscapedDomain,
                NotNullHomotopic, StartMismatch, LiftCollision) as exc:
            return MonodromyObstruction(y, (p, q), exc)
        raise RuntimeError(
            "a doubled fiber survived endpoint-checked contraction; "
            "lifting uniqueness is broken internally"
        )
    return None
