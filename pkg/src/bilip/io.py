"""JSON formats: graphs, maps, walks, reports, corpus sidecars.

Loading is strict: unknown fields are rejected and every diagnostic names
the file and field.  Emission is deterministic: sorted keys, floats at 17
significant digits, UTF-8, one trailing newline; non-finite numbers emit
as null.  Identical values therefore serialize to identical bytes.
"""
from __future__ import annotations

import json
import math

from .corpus import CorpusSpec
from .errors import InputError
from .graph_map import GraphMap
from .metric_graph import GraphPoint, MetricGraph, Walk, WalkSegment
from .theorem import OracleReport, TheoremReport


# -- deterministic emitter ----------------------------------------------------


def _emit(x) -> str:
    if x is None:
        return "null"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            return "null"
        return "%.17g" % x
    if isinstance(x, str):
        return json.dumps(x, ensure_ascii=False)
    if isinstance(x, (list, tuple)):
        return "[" + ",".join(_emit(v) for v in x) + "]"
    if isinstance(x, dict):
        items = sorted(x.items())
        return "{" + ",".join(f"{json.dumps(k, ensure_ascii=False)}:{_emit(v)}" for k, v in items) + "}"
    raise InputError(f"cannot serialize {type(x).__name__} value {x!r}")


def dumps(obj) -> str:
    return _emit(obj) + "\n"


def save(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))


def load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as ex:
        raise InputError(f"{path}: {ex.strerror or ex}")
    except json.JSONDecodeError as ex:
        raise InputError(f"{path}:{ex.lineno}:{ex.colno}: {ex.msg}")


# -- field checking -----------------------------------------------------------


def _require_object(obj, where: str) -> dict:
    if not isinstance(obj, dict):
        raise InputError(f"{where}: expected an object, got {type(obj).__name__}")
    return obj


def _fields(obj: dict, where: str, required: tuple[str, ...], optional: tuple[str, ...] = ()):
    for k in required:
        if k not in obj:
            raise InputError(f"{where}: missing field {k!r}")
    unknown = set(obj) - set(required) - set(optional)
    if unknown:
        raise InputError(f"{where}: unknown field {sorted(unknown)[0]!r}")


# -- points and walks ---------------------------------------------------------


def point_to_obj(p: GraphPoint) -> dict:
    if p.is_vertex:
        return {"v": p.vertex}
    return {"e": p.edge, "t": p.t}


def point_from_obj(obj, g: MetricGraph, where: str) -> GraphPoint:
    _require_object(obj, where)
    if "v" in obj:
        _fields(obj, where, ("v",))
        if not isinstance(obj["v"], str):
            raise InputError(f"{where}: vertex id must be a string")
        return g.check_point(g.vertex_point(obj["v"]))
    _fields(obj, where, ("e", "t"))
    if not isinstance(obj["e"], str):
        raise InputError(f"{where}: edge id must be a string")
    if not isinstance(obj["t"], (int, float)) or isinstance(obj["t"], bool):
        raise InputError(f"{where}: parameter t must be a number")
    return g.point(obj["e"], float(obj["t"]))


def walk_to_obj(w: Walk) -> dict:
    return {
        "start": point_to_obj(w.start),
        "segments": [
            [s.edge, "+" if s.t1 >= s.t0 else "-", s.t0, s.t1] for s in w.segments
        ],
    }


def walk_from_obj(obj, g: MetricGraph, where: str) -> Walk:
    _require_object(obj, where)
    _fields(obj, where, ("start", "segments"))
    start = point_from_obj(obj["start"], g, f"{where}.start")
    if not isinstance(obj["segments"], list):
        raise InputError(f"{where}.segments: expected an array")
    segs = []
    for i, row in enumerate(obj["segments"]):
        spot = f"{where}.segments[{i}]"
        if not (isinstance(row, list) and len(row) == 4):
            raise InputError(f"{spot}: expected [edge, dir, t0, t1]")
        eid, sign, t0, t1 = row
        if not isinstance(eid, str):
            raise InputError(f"{spot}: edge id must be a string")
        if sign not in ("+", "-"):
            raise InputError(f"{spot}: direction must be '+' or '-'")
        for t in (t0, t1):
            if not isinstance(t, (int, float)) or isinstance(t, bool):
                raise InputError(f"{spot}: parameters must be numbers")
        if (sign == "+") != (float(t1) >= float(t0)):
            raise InputError(f"{spot}: direction {sign!r} contradicts t0={t0!r}, t1={t1!r}")
        g.edge(eid)
        segs.append(WalkSegment(eid, float(t0), float(t1)))
    return Walk(start, tuple(segs))


# -- graphs and maps ----------------------------------------------------------


def graph_to_obj(g: MetricGraph) -> dict:
    return {
        "vertices": list(g.vertex_ids),
        "edges": [
            {"id": e, "a": g.edge(e)[0], "b": g.edge(e)[1], "len": g.edge(e)[2]}
            for e in g.edge_ids
        ],
        "boundary": sorted(g.boundary),
    }


def graph_from_obj(obj, where: str) -> MetricGraph:
    _require_object(obj, where)
    _fields(obj, where, ("vertices", "edges"), ("boundary",))
    verts = obj["vertices"]
    if not isinstance(verts, list) or not all(isinstance(v, str) for v in verts):
        raise InputError(f"{where}.vertices: expected an array of string ids")
    rows = obj["edges"]
    if not isinstance(rows, list):
        raise InputError(f"{where}.edges: expected an array")
    edges = []
    for i, row in enumerate(rows):
        spot = f"{where}.edges[{i}]"
        _require_object(row, spot)
        _fields(row, spot, ("id", "a", "b", "len"))
        for k in ("id", "a", "b"):
            if not isinstance(row[k], str):
                raise InputError(f"{spot}.{k}: expected a string")
        ln = row["len"]
        if not isinstance(ln, (int, float)) or isinstance(ln, bool) or not ln > 0:
            raise InputError(f"{spot}.len: expected a positive number, got {ln!r}")
        edges.append((row["id"], row["a"], row["b"], float(ln)))
    boundary = obj.get("boundary", [])
    if not isinstance(boundary, list) or not all(isinstance(v, str) for v in boundary):
        raise InputError(f"{where}.boundary: expected an array of string ids")
    try:
        return MetricGraph(verts, edges, boundary=tuple(boundary))
    except InputError as ex:
        raise InputError(f"{where}: {ex}")


def load_graph(path: str) -> MetricGraph:
    return graph_from_obj(load_json(path), path)


def map_to_obj(m: GraphMap) -> dict:
    return {
        "vertex_map": dict(m.vertex_map),
        "edge_map": {
            e: [(f if s > 0 else "~" + f) for f, s in walk]
            for e, walk in m.edge_map.items()
        },
    }


def map_from_obj(obj, domain: MetricGraph, codomain: MetricGraph, where: str) -> GraphMap:
    _require_object(obj, where)
    _fields(obj, where, ("vertex_map", "edge_map"))
    vm = _require_object(obj["vertex_map"], f"{where}.vertex_map")
    em = _require_object(obj["edge_map"], f"{where}.edge_map")
    for k, v in vm.items():
        if not isinstance(v, str):
            raise InputError(f"{where}.vertex_map.{k}: expected a string")
    for k, v in em.items():
        if not isinstance(v, list) or not all(isinstance(tk, str) for tk in v):
            raise InputError(f"{where}.edge_map.{k}: expected an array of edge tokens")
    try:
        return GraphMap(domain, codomain, vm, em)
    except InputError as ex:
        raise InputError(f"{where}: {ex}")


def load_map(path: str, domain: MetricGraph, codomain: MetricGraph) -> GraphMap:
    return map_from_obj(load_json(path), domain, codomain, path)


# -- corpus sidecar -----------------------------------------------------------


def spec_to_obj(spec: CorpusSpec) -> dict:
    return {
        "generator": spec.generator,
        "params": dict(spec.params),
        "seed": spec.seed,
        "expected": {
            "verdict": spec.expected_verdict,
            "failed_hypothesis": spec.expected_failure,
        },
    }


def spec_from_obj(obj, where: str) -> CorpusSpec:
    _require_object(obj, where)
    _fields(obj, where, ("generator", "params", "seed", "expected"))
    exp = _require_object(obj["expected"], f"{where}.expected")
    _fields(exp, f"{where}.expected", ("verdict",), ("failed_hypothesis",))
    if not isinstance(obj["generator"], str):
        raise InputError(f"{where}.generator: expected a string")
    params = _require_object(obj["params"], f"{where}.params")
    seed = obj["seed"]
    if seed is not None and not isinstance(seed, int):
        raise InputError(f"{where}.seed: expected an integer or null")
    return CorpusSpec(
        obj["generator"], dict(params), seed,
        exp["verdict"], exp.get("failed_hypothesis"),
    )


def load_spec(path: str) -> CorpusSpec:
    return spec_from_obj(load_json(path), path)


# -- reports ------------------------------------------------------------------


def _witness_pair_obj(w) -> list | None:
    if w is None:
        return None
    return [point_to_obj(w[0]), point_to_obj(w[1]), float(w[2])]


def oracle_to_obj(o: OracleReport) -> dict:
    return {
        "L": o.L,                      # inf serializes as null
        "mesh": o.mesh,
        "pair_count": o.pair_count,
        "witness_upper": _witness_pair_obj(o.witness_upper),
        "witness_lower": _witness_pair_obj(o.witness_lower),
        "noninjective": _witness_pair_obj(o.noninjective),
    }


def report_to_obj(rep: TheoremReport) -> dict:
    return {
        "verdict": rep.verdict,
        "L": rep.L,
        "failed_hypothesis": rep.failed_hypothesis,
        "witness": None if rep.witness is None else repr(rep.witness),
        "hypotheses": dict(rep.hypotheses),
        "oracle": oracle_to_obj(rep.oracle),
        "runtime": {k: float(v) for k, v in rep.runtime.items()},
    }
