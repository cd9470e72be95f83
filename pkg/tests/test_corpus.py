import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bilip.corpus import (
    GENERATORS,
    CorpusSpec,
    SplitMix64,
    build,
    gen_cycle_cover,
    gen_mcsimpleminded,
    gen_tree_perturbed,
    tree_suite,
)
from bilip.errors import InputError
from bilip.io import dumps, graph_to_obj

from oracles import numpy_splitmix64


class TestSplitMix:
    def test_published_reference_stream(self):
        rng = SplitMix64(0)
        assert [rng.u64() for _ in range(3)] == [
            0xE220A8397B1DCDAF,
            0x6E789E6AA1B965F4,
            0x06C45D188009454F,
        ]

    @given(st.integers(0, 2 ** 64 - 1))
    @settings(max_examples=30)
    def test_matches_vectorized_reimplementation(self, seed):
        rng = SplitMix64(seed)
        assert [rng.u64() for _ in range(16)] == numpy_splitmix64(seed, 16)

    @given(st.integers(0, 2 ** 64 - 1))
    @settings(max_examples=30)
    def test_unit_stays_in_range(self, seed):
        rng = SplitMix64(seed)
        for _ in range(32):
            u = rng.unit()
            assert 0.0 <= u < 1.0

    @given(st.integers(0, 2 ** 64 - 1), st.integers(1, 17))
    @settings(max_examples=30)
    def test_randrange_bounds(self, seed, n):
        rng = SplitMix64(seed)
        for _ in range(32):
            assert 0 <= rng.randrange(n) < n

    def test_log_uniform_bounds(self):
        rng = SplitMix64(5)
        for _ in range(100):
            x = rng.log_uniform(1.0 / 3.0, 3.0)
            assert 1.0 / 3.0 - 1e-12 <= x <= 3.0 + 1e-12


class TestTreeGenerator:
    def test_seed_seven_replays_from_the_draw_order(self):
        # replay the documented draw order (parent, base, factor per edge)
        # against an independent stream and rebuild the lengths
        m, spec = gen_tree_perturbed(6, 3.0, 7)
        stream = numpy_splitmix64(7, 15)
        units = [(x >> 11) / float(1 << 53) for x in stream]
        it = iter(units)
        for i in range(1, 6):
            parent = min(int(next(it) * i), i - 1)
            base = math.exp(
                math.log(0.75) + (math.log(4.0 / 3.0) - math.log(0.75)) * next(it)
            )
            factor = math.exp(
                math.log(1.0 / 3.0) + (math.log(3.0) - math.log(1.0 / 3.0)) * next(it)
            )
            a, b, ell = m.codomain.edge(f"e{i}")
            assert a == f"v{parent}" and b == f"v{i}"
            assert ell == pytest.approx(base, rel=1e-15)
            assert m.domain.edge(f"e{i}")[2] == pytest.approx(base * factor, rel=1e-15)

    def test_structure_and_bounds(self):
        for seed in (1, 2, 3):
            m, spec = gen_tree_perturbed(12, 2.0, seed)
            assert len(m.domain.vertex_ids) == 12
            assert len(m.domain.edge_ids) == 11
            assert spec.expected_verdict == "Certified"
            for e in m.domain.edge_ids:
                assert 0.75 * (1 - 1e-12) <= m.codomain.edge(e)[2] <= 4.0 / 3.0 * (1 + 1e-12)
                factor = m.domain.edge(e)[2] / m.codomain.edge(e)[2]
                assert 0.5 * (1 - 1e-12) <= factor <= 2.0 * (1 + 1e-12)

    def test_regeneration_is_byte_identical(self):
        a = gen_tree_perturbed(9, 3.0, 41)[0]
        b = gen_tree_perturbed(9, 3.0, 41)[0]
        assert dumps(graph_to_obj(a.domain)) == dumps(graph_to_obj(b.domain))
        assert dumps(graph_to_obj(a.codomain)) == dumps(graph_to_obj(b.codomain))

    def test_input_validation(self):
        with pytest.raises(InputError):
            gen_tree_perturbed(1, 3.0, 1)
        with pytest.raises(InputError):
            gen_tree_perturbed(5, 0.9, 1)


class TestCycleCover:
    def test_structure(self):
        m, spec = gen_cycle_cover(6, 3)
        assert len(m.domain.vertex_ids) == 18
        assert len(m.codomain.vertex_ids) == 6
        assert all(m.domain.edge(e)[2] == 1.0 for e in m.domain.edge_ids)
        assert spec.expected_verdict == "HypothesisFailure"
        assert spec.expected_failure == "simply_connected"
        for i in range(18):
            assert m.vertex_map[f"d{i}"] == f"c{i % 6}"

    def test_degree_one_is_an_isomorphism(self):
        m, _ = gen_cycle_cover(4, 1)
        assert len(m.domain.vertex_ids) == len(m.codomain.vertex_ids) == 4

    def test_input_validation(self):
        with pytest.raises(InputError):
            gen_cycle_cover(2, 3)
        with pytest.raises(InputError):
            gen_cycle_cover(6, 0)


class TestTunnel:
    def test_snapping_and_boundary(self):
        m, spec = gen_mcsimpleminded(10, 3)
        assert len(m.domain.edge_ids) == 10
        assert all(m.domain.edge(e)[2] == 1.0 for e in m.domain.edge_ids)
        assert m.domain.boundary == frozenset({"P0", "P10"})
        assert m.codomain.total_length() == pytest.approx(3.0, abs=1e-12)
        assert spec.expected_failure == "simply_connected"

    def test_non_divisible_length_snaps_to_whole_segments(self):
        m, _ = gen_mcsimpleminded(10.4, 3)
        assert len(m.domain.edge_ids) == 10

    def test_input_validation(self):
        with pytest.raises(InputError):
            gen_mcsimpleminded(2.5, 3.0)  # shorter than one circumference
        with pytest.raises(InputError):
            gen_mcsimpleminded(10.0, 0.0)


class TestSpecsAndSuite:
    def test_build_dispatches_and_rejects_unknown(self):
        spec = CorpusSpec("cycle_cover", {"k": 6, "n": 2}, None, "HypothesisFailure")
        m = build(spec)
        assert len(m.domain.vertex_ids) == 12
        with pytest.raises(InputError):
            build(CorpusSpec("nope", {}, 1, "Certified"))
        assert set(GENERATORS) == {"tree_perturbed", "cycle_cover", "mcsimpleminded"}

    def test_tree_suite_covers_the_size_range(self):
        suite = tree_suite()
        assert len(suite) == 100
        assert [s.seed for s in suite] == list(range(1, 101))
        sizes = {s.params["n"] for s in suite}
        assert min(sizes) == 2 and max(sizes) == 50
        assert all(s.expected_verdict == "Certified" for s in suite)
        assert all(s.params["L_max"] == 3.0 for s in suite)
