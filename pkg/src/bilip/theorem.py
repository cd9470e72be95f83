"""Top-level verdict pipeline and the independent brute-force oracle.

``verify_theorem`` measures every hypothesis of the statement "a locally
L-bilipschitz map into a simply connected space is L-bilipschitz": map
structure, codomain cycle rank, local injectivity, the local constant at
scale r_0, regularity constants of both spaces, the quotient inclusions,
and monodromy.  The verdict is Certified only when an all-pairs net oracle
independently agrees; the staged procedures never certify on their own.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import (
    EscapedDomain,
    LiftError,
    NotLocallyInjective,
    PrerequisiteMissing,
)
from .graph_map import (
    GraphMap,
    LocalBilipschitzReport,
    local_bilipschitz_constant,
    local_injectivity,
    lq_verify,
    verify_map,
)
from .metric_graph import (
    ABS_TOL,
    GraphPoint,
    MetricGraph,
    ahlfors_constant,
    ball,
    cycle_rank,
    distance,
    tol,
)
from .nets import net_on_graph, pairwise_distances

CERT_SLACK = 1e-9      # oracle may exceed the certified constant by this much


@dataclass(frozen=True)
class OracleReport:
    L: float                                   # math.inf when noninjective
    mesh: float
    witness_upper: tuple[GraphPoint, GraphPoint, float] | None
    witness_lower: tuple[GraphPoint, GraphPoint, float] | None
    noninjective: tuple[GraphPoint, GraphPoint, float] | None
    pair_count: int


def global_bilipschitz_oracle(m: GraphMap, mesh: float | None = None) -> OracleReport:
    """Worst distortion ratio over all net-point pairs, both directions.

    Quadratic and independent of every staged procedure: distances on both
    sides are exact, only the pair sampling is mesh-limited.  A pair at
    definite distance whose images coincide is returned as a noninjectivity
    witness with L = inf.
    """
    if mesh is None:
        mesh = m.r0_default() / 2.0
    net, spans = net_on_graph(m.domain, mesh)
    image = m.image_pointset(net)
    scale = m.r0_default()
    div_dom = 1e-6 * scale
    div_img = 1e-9 * scale

    best_up = 1.0
    best_lo = 1.0
    wit_up = None
    wit_lo = None
    pairs = 0
    ne = len(m.domain.edge_ids)
    for i in range(ne):
        for j in range(i, ne):
            d = pairwise_distances(net.take(spans[i]), net.take(spans[j]))
            dp = pairwise_distances(image.take(spans[i]), image.take(spans[j]))
            if i == j:
                iu = np.triu_indices(d.shape[0], k=1)
                d_flat, dp_flat = d[iu], dp[iu]
                rows, cols = iu
            else:
                d_flat, dp_flat = d.ravel(), dp.ravel()
                rows, cols = np.divmod(np.arange(d.size), d.shape[1])
            sel = d_flat > ABS_TOL
            d_flat, dp_flat = d_flat[sel], dp_flat[sel]
            rows, cols = rows[sel], cols[sel]
            pairs += len(d_flat)

            dead = (d_flat >= div_dom) & (dp_flat <= div_img)
            if dead.any():
                k = int(np.argmax(dead))
                p = net.graph_point(spans[i].start + rows[k])
                q = net.graph_point(spans[j].start + cols[k])
                return OracleReport(
                    math.inf, mesh, None, None, (p, q, float(d_flat[k])), pairs,
                )
            ok = dp_flat > ABS_TOL
            if not ok.any():
                continue
            okidx = np.flatnonzero(ok)
            up = dp_flat[okidx] / d_flat[okidx]
            lo = d_flat[okidx] / dp_flat[okidx]
            ku, kl = int(np.argmax(up)), int(np.argmax(lo))
            if up[ku] > best_up or wit_up is None:
                best_up = max(best_up, float(up[ku]))
                k = okidx[ku]
                wit_up = (net.graph_point(spans[i].start + rows[k]),
                          net.graph_point(spans[j].start + cols[k]), float(up[ku]))
            if lo[kl] > best_lo or wit_lo is None:
                best_lo = max(best_lo, float(lo[kl]))
                k = okidx[kl]
                wit_lo = (net.graph_point(spans[i].start + rows[k]),
                          net.graph_point(spans[j].start + cols[k]), float(lo[kl]))
    return OracleReport(max(best_up, best_lo), mesh, wit_up, wit_lo, None, pairs)


def _ahlfors_inputs(g: MetricGraph) -> tuple[list[GraphPoint], np.ndarray]:
    samples = [g.vertex_point(v) for v in g.vertex_ids]
    samples.extend(g.point(e, 0.5) for e in g.edge_ids)
    min_edge = min(g.edge_length(e) for e in g.edge_ids)
    diam = float(g.vertex_distance_matrix().max()) + min_edge
    lo = 0.4 * min_edge
    hi = max(0.5 * diam, 2.0 * lo)
    return samples, np.geomspace(lo, hi, 5)


@dataclass(frozen=True)
class TheoremReport:
    verdict: str                       # "Certified" | "HypothesisFailure" | "Refuted"
    L: float | None                    # certified constant (the measured local one)
    failed_hypothesis: str | None
    witness: object
    hypotheses: dict
    local_report: LocalBilipschitzReport | None
    oracle: OracleReport
    runtime: dict


def verify_theorem(
    m: GraphMap,
    q: float = 1.0,
    r_0: float | None = None,
    mesh: float | None = None,
) -> TheoremReport:
    """Measure all hypotheses in order, then cross-check with the oracle.

    Every outcome is a verdict: HypothesisFailure names the first failing
    hypothesis (structure, simple connectivity, local injectivity, lift
    escape, quotient inclusion); Refuted carries a concrete witness pair;
    Certified(L) additionally requires oracle_L <= L + 1e-9.
    """
    stages: dict[str, float] = {}
    t_all = time.perf_counter()

    def timed(name):
        stages[name] = time.perf_counter() - timed.mark
        timed.mark = time.perf_counter()
    timed.mark = t_all

    violations = verify_map(m)
    rank = cycle_rank(m.codomain)
    germ_vertex = local_injectivity(m)
    timed("structure")

    r0 = m.r0_default() if r_0 is None else float(r_0)
    inj_ok = germ_vertex is None
    inj_witness: object = germ_vertex
    local_rep: LocalBilipschitzReport | None = None
    L: float | None = None
    if not violations and inj_ok:
        try:
            local_rep = local_bilipschitz_constant(m, r0, mesh)
            L = local_rep.L
        except NotLocallyInjective as ex:
            inj_ok = False
            inj_witness = (ex.p, ex.q, ex.distance, ex.image_distance)
    timed("local_constant")

    sd, rd = _ahlfors_inputs(m.domain)
    c_dom = ahlfors_constant(m.domain, q, rd, sd)
    sc, rc = _ahlfors_inputs(m.codomain)
    c_cod = ahlfors_constant(m.codomain, q, rc, sc)
    timed("ahlfors")

    escaped = False
    escape_witness = None
    lq_violation = None
    obstruction = None
    if not violations and inj_ok and L is not None:
        verts = sorted(m.domain.vertex_ids)
        stride = max(1, len(verts) // 8)
        lq_samples = [m.domain.vertex_point(v) for v in verts[::stride]]
        try:
            lq_violation = lq_verify(m, max(L, 1.0), lq_samples, [r0 / 2.0, r0])
        except EscapedDomain as ex:
            escaped = True
            escape_witness = (ex.marker, ex.remaining)
        except LiftError as ex:
            # a ball around an image point is not covered: the inner
            # inclusion is unrealizable, which is a quotient failure
            lq_violation = ex
        timed("lq")
        if not escaped and lq_violation is None:
            from .lifting import monodromy_injectivity

            obstruction = monodromy_injectivity(m)
            if obstruction is not None and isinstance(obstruction.failure, EscapedDomain):
                escaped = True
                escape_witness = (obstruction.failure.marker, obstruction.failure.remaining)
                obstruction = None
        timed("monodromy")

    oracle = global_bilipschitz_oracle(m)
    timed("oracle")

    hypotheses = {
        "L": L,
        "r_0": r0,
        "q": q,
        "C_domain": c_dom,
        "C_codomain": c_cod,
        "cycle_rank_codomain": rank,
        "local_injectivity": inj_ok,
        "escaped": escaped,
    }
    stages["total"] = time.perf_counter() - t_all

    def report(verdict, L_out, failed, witness):
        return TheoremReport(
            verdict, L_out, failed, witness, hypotheses, local_rep, oracle, stages,
        )

    if violations:
        return report("HypothesisFailure", None, "map_structure", violations[0])
    if rank != 0:
        return report("HypothesisFailure", None, "simply_connected", rank)
    if not inj_ok:
        return report("HypothesisFailure", None, "local_injectivity", inj_witness)
    if escaped:
        return report("HypothesisFailure", None, "escaped", escape_witness)
    if lq_violation is not None:
        return report("HypothesisFailure", None, "lq", lq_violation)
    if obstruction is not None:
        return report("Refuted", None, None, obstruction.preimages)
    if oracle.noninjective is not None:
        return report("Refuted", None, None, oracle.noninjective[:2])
    if oracle.L > L + CERT_SLACK:
        worst = oracle.witness_upper
        if oracle.witness_lower and oracle.witness_lower[2] >= (worst[2] if worst else 0.0):
            worst = oracle.witness_lower
        return report("Refuted", None, None, (worst[0], worst[1]))
    return report("Certified", L, None, None)


def lower_bound_via_disjoint_balls(
    m: GraphMap, x: GraphPoint, y: GraphPoint, L: float,
) -> float:
    """Certified lower bound d'(Ux, Uy) >= d(x, y)/L via two disjoint balls.

    The open balls of radius d/2 around x and y are disjoint by the
    triangle inequality (re-verified on their segment lists); injectivity
    (monodromy) makes their images disjoint, and the quotient inner
    inclusion at radius d/2 puts a ball of radius d/(2L) around each image
    point inside the respective image.  Two disjoint balls of radius
    d/(2L) around Ux and Uy force d'(Ux, Uy) >= d/L.
    """
    from .lifting import monodromy_injectivity

    x = m.domain.check_point(x)
    y = m.domain.check_point(y)
    d = distance(m.domain, x, y)
    if d <= ABS_TOL:
        raise PrerequisiteMissing("the two points coincide; no separation to bound")
    obs = monodromy_injectivity(m)
    if obs is not None:
        raise PrerequisiteMissing(
            f"injectivity did not certify: doubled fiber over {obs.point}"
        )
    try:
        viol = lq_verify(m, L, [x, y], [d / 2.0])
    except EscapedDomain as ex:
        raise PrerequisiteMissing(
            f"quotient check lost a lift past marker {ex.marker!r}"
        )
    if viol is not None:
        raise PrerequisiteMissing(
            f"quotient inclusion fails at radius {d / 2.0:.12g}: {viol.detail}"
        )
    bx = ball(m.domain, x, d / 2.0)
    by = ball(m.domain, y, d / 2.0)
    overlap = 0.0
    segs_y: dict[str, list] = {}
    for s in by.segments:
        segs_y.setdefault(s.edge, []).append((s.lo, s.hi))
    for s in bx.segments:
        for lo, hi in segs_y.get(s.edge, ()):
            cut = min(s.hi, hi) - max(s.lo, lo)
            if cut > 0:
                overlap += cut * m.domain.edge_length(s.edge)
    if overlap > tol(d):
        raise RuntimeError(
            f"balls of radius d/2 overlap by {overlap:.12g}; the metric is inconsistent"
        )
    return d / L
