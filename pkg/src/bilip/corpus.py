"""Deterministic instance generators: positives, necessity probes, escapes.

All randomness flows through SplitMix64 with a documented draw order, so a
(generator, parameters, seed) triple reproduces the same instance byte for
byte in any implementation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InputError
from .graph_map import GraphMap
from .metric_graph import MetricGraph

MASK64 = (1 << 64) - 1


class SplitMix64:
    """The splitmix64 sequence (Steele, Lea, Vigna).

    state += 0x9E3779B97F4A7C15; z = state;
    z = (z ^ z>>30) * 0xBF58476D1CE4E5B9;
    z = (z ^ z>>27) * 0x94D049BB133111EB;
    output z ^ z>>31.

    ``unit`` takes the top 53 bits over 2^53, giving floats in [0, 1).
    """

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def unit(self) -> float:
        return (self.u64() >> 11) / float(1 << 53)

    def uniform(self, a: float, b: float) -> float:
        return a + (b - a) * self.unit()

    def log_uniform(self, a: float, b: float) -> float:
        return math.exp(self.uniform(math.log(a), math.log(b)))

    def randrange(self, n: int) -> int:
        return min(int(self.unit() * n), n - 1)


@dataclass(frozen=True)
class CorpusSpec:
    generator: str
    params: dict
    seed: int | None
    expected_verdict: str
    expected_failure: str | None = None


def gen_tree_perturbed(n: int, L_max: float, seed: int) -> tuple[GraphMap, CorpusSpec]:
    """Random tree codomain; domain is the same tree with each edge length
    scaled by an independent log-uniform factor in [1/L_max, L_max]; the
    map is the combinatorial identity.  Draw order per edge i = 1..n-1:
    parent index, base length in [3/4, 4/3], stretch factor."""
    if n < 2:
        raise InputError(f"a tree instance needs n >= 2 vertices, got {n}")
    if L_max < 1:
        raise InputError(f"L_max must be >= 1, got {L_max!r}")
    rng = SplitMix64(seed)
    vertices = [f"v{i}" for i in range(n)]
    dom_edges = []
    cod_edges = []
    for i in range(1, n):
        parent = rng.randrange(i)
        base = rng.log_uniform(0.75, 4.0 / 3.0)
        factor = rng.log_uniform(1.0 / L_max, L_max)
        eid = f"e{i}"
        cod_edges.append((eid, vertices[parent], vertices[i], base))
        dom_edges.append((eid, vertices[parent], vertices[i], base * factor))
    domain = MetricGraph(vertices, dom_edges)
    codomain = MetricGraph(vertices, cod_edges)
    m = GraphMap(domain, codomain, {v: v for v in vertices}, {e[0]: [e[0]] for e in dom_edges})
    spec = CorpusSpec("tree_perturbed", {"n": n, "L_max": L_max}, seed, "Certified")
    return m, spec


def gen_cycle_cover(k: int, n: int) -> tuple[GraphMap, CorpusSpec]:
    """Domain cycle of n*k unit edges wrapping n times around a codomain
    cycle of k unit edges; a local isometry with every fiber of size n."""
    if k < 3:
        raise InputError(f"codomain cycle needs k >= 3 edges, got {k}")
    if n < 1:
        raise InputError(f"cover degree must be >= 1, got {n}")
    dom_vs = [f"d{i}" for i in range(n * k)]
    cod_vs = [f"c{i}" for i in range(k)]
    dom_es = [(f"de{i}", dom_vs[i], dom_vs[(i + 1) % (n * k)], 1.0) for i in range(n * k)]
    cod_es = [(f"ce{i}", cod_vs[i], cod_vs[(i + 1) % k], 1.0) for i in range(k)]
    domain = MetricGraph(dom_vs, dom_es)
    codomain = MetricGraph(cod_vs, cod_es)
    m = GraphMap(
        domain, codomain,
        {f"d{i}": f"c{i % k}" for i in range(n * k)},
        {f"de{i}": [f"ce{i % k}"] for i in range(n * k)},
    )
    spec = CorpusSpec(
        "cycle_cover", {"k": k, "n": n}, None,
        "HypothesisFailure", "simply_connected",
    )
    return m, spec


def gen_mcsimpleminded(tunnel_len: float, tube_circumference: float) -> tuple[GraphMap, CorpusSpec]:
    """A truncated endless tunnel wrapped around a tube at unit speed.

    Domain: a path of unit-speed segments with both ends boundary-marked;
    codomain: a 3-edge cycle of the given circumference.  The segment
    length is circumference/3 and the tunnel is snapped to a whole number
    of segments, so fibers sit exactly one circumference apart.  Lifts of
    loops winding past a marker escape with the partial lift attached.
    """
    if tube_circumference <= 0:
        raise InputError(f"circumference must be positive, got {tube_circumference!r}")
    if tunnel_len <= tube_circumference:
        raise InputError("the tunnel must be longer than one circumference")
    unit = tube_circumference / 3.0
    segs = round(tunnel_len / unit)
    cod_vs = ["W0", "W1", "W2"]
    cod_es = [("c0", "W0", "W1", unit), ("c1", "W1", "W2", unit), ("c2", "W2", "W0", unit)]
    dom_vs = [f"P{i}" for i in range(segs + 1)]
    dom_es = [(f"t{i}", f"P{i}", f"P{i+1}", unit) for i in range(segs)]
    domain = MetricGraph(dom_vs, dom_es, boundary=(dom_vs[0], dom_vs[-1]))
    codomain = MetricGraph(cod_vs, cod_es)
    m = GraphMap(
        domain, codomain,
        {f"P{i}": f"W{i % 3}" for i in range(segs + 1)},
        {f"t{i}": [f"c{i % 3}"] for i in range(segs)},
    )
    spec = CorpusSpec(
        "mcsimpleminded",
        {"tunnel_len": tunnel_len, "tube_circumference": tube_circumference},
        None, "HypothesisFailure", "simply_connected",
    )
    return m, spec


GENERATORS = {
    "tree_perturbed": lambda params, seed: gen_tree_perturbed(
        int(params["n"]), float(params["L_max"]), int(seed)
    ),
    "cycle_cover": lambda params, seed: gen_cycle_cover(int(params["k"]), int(params["n"])),
    "mcsimpleminded": lambda params, seed: gen_mcsimpleminded(
        float(params["tunnel_len"]), float(params["tube_circumference"])
    ),
}


def build(spec: CorpusSpec) -> GraphMap:
    try:
        gen = GENERATORS[spec.generator]
    except KeyError:
        raise InputError(f"unknown generator {spec.generator!r}")
    m, _ = gen(spec.params, spec.seed)
    return m


def tree_suite(count: int = 100, L_max: float = 3.0) -> list[CorpusSpec]:
    """The standard positive suite: seeds 1..count, sizes cycling 2..50."""
    return [
        CorpusSpec("tree_perturbed", {"n": 2 + ((seed - 1) % 49), "L_max": L_max},
                   seed, "Certified")
        for seed in range(1, count + 1)
    ]
