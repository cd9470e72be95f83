import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "suite",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("suite")


from bilip.corpus import gen_cycle_cover, gen_mcsimpleminded, gen_tree_perturbed  # noqa: E402
from bilip.metric_graph import MetricGraph, Walk, WalkSegment  # noqa: E402
from bilip.graph_map import GraphMap  # noqa: E402


def triangle():
    return MetricGraph(
        ["A", "B", "C"],
        [("ab", "A", "B", 1.0), ("bc", "B", "C", 2.0), ("ca", "C", "A", 2.5)],
    )


def loop_graph(length=3.0):
    return MetricGraph(["v"], [("l", "v", "v", length)])


def path_graph(lengths):
    verts = [f"p{i}" for i in range(len(lengths) + 1)]
    edges = [(f"e{i}", verts[i], verts[i + 1], ln) for i, ln in enumerate(lengths)]
    return MetricGraph(verts, edges)


def star3(arm=1.0):
    return MetricGraph(
        ["o", "x", "y", "z"],
        [("ox", "o", "x", arm), ("oy", "o", "y", arm), ("oz", "o", "z", arm)],
    )


def cycle_graph(n, edge_len=1.0, prefix="c"):
    verts = [f"{prefix}{i}" for i in range(n)]
    edges = [
        (f"{prefix}e{i}", verts[i], verts[(i + 1) % n], edge_len) for i in range(n)
    ]
    return MetricGraph(verts, edges)


def identity_map(g):
    return GraphMap(
        g, g, {v: v for v in g.vertex_ids}, {e: [e] for e in g.edge_ids}
    )


def cover_map(k, n=1):
    # degree n cover of a unit-edge k-gon
    return gen_cycle_cover(k, n)[0]


def scale_map(factor=2.0, lengths=(1.0, 1.0)):
    dom = path_graph([ln * factor for ln in lengths])
    cod = path_graph(list(lengths))
    vmap = {v: v for v in dom.vertex_ids}
    emap = {e: [e] for e in dom.edge_ids}
    return GraphMap(dom, cod, vmap, emap)


def fold_map():
    # both arms of a path fold onto a single codomain edge
    dom = path_graph([1.0, 1.0])
    cod = MetricGraph(["q0", "q1"], [("f", "q0", "q1", 1.0)])
    return GraphMap(
        dom, cod, {"p0": "q0", "p1": "q1", "p2": "q0"}, {"e0": ["f"], "e1": ["~f"]}
    )


def figure_eight():
    return MetricGraph(["w"], [("a", "w", "w", 1.0), ("b", "w", "w", 1.0)])


def walk(start, segs):
    return Walk(start, tuple(WalkSegment(e, t0, t1) for e, t0, t1 in segs))


@pytest.fixture(scope="session")
def tree_small():
    return gen_tree_perturbed(6, 3.0, 7)[0]


@pytest.fixture(scope="session")
def cover_6_3():
    return gen_cycle_cover(6, 3)[0]


@pytest.fixture(scope="session")
def tunnel_10_3():
    return gen_mcsimpleminded(10.0, 3.0)[0]
