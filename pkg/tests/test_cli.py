"""Command-line interface: exit codes, JSON payloads, deterministic output."""
import json
import subprocess
import sys

import pytest

from bilip import io as bio
from bilip.cli import main
from bilip.corpus import gen_cycle_cover, gen_mcsimpleminded, gen_tree_perturbed


def run_cli(*argv):
    proc = subprocess.run(
        [sys.executable, "-m", "bilip", *argv],
        capture_output=True,
        text=True,
    )
    return proc.returncode, proc.stdout, proc.stderr


def write_instance(m, d, prefix=""):
    paths = [str(d / f"{prefix}{name}.json") for name in ("domain", "codomain", "map")]
    bio.save(paths[0], bio.graph_to_obj(m.domain))
    bio.save(paths[1], bio.graph_to_obj(m.codomain))
    bio.save(paths[2], bio.map_to_obj(m))
    return paths


def codomain_loop_obj(k, winds, start_edge=0, vp="c", ep="ce"):
    # closed walk around a unit k-cycle, starting at the source of edge start_edge
    segs = []
    for step in range(k * winds):
        segs.append([f"{ep}{(start_edge + step) % k}", "+", 0.0, 1.0])
    return {"start": {"v": f"{vp}{start_edge}"}, "segments": segs}


# -- check --------------------------------------------------------------------


def test_check_certified_exit_0(tmp_path):
    m, _ = gen_tree_perturbed(6, 3.0, 7)
    code, out, err = run_cli("check", *write_instance(m, tmp_path))
    assert code == 0, err
    rep = json.loads(out)
    assert rep["verdict"] == "Certified"
    assert rep["L"] >= 1.0
    assert rep["failed_hypothesis"] is None


def test_check_hypothesis_failure_exit_1(tmp_path):
    m, _ = gen_cycle_cover(6, 2)
    code, out, err = run_cli("check", *write_instance(m, tmp_path))
    assert code == 1, err
    rep = json.loads(out)
    assert rep["verdict"] == "HypothesisFailure"
    assert rep["failed_hypothesis"] == "simply_connected"
    assert rep["L"] is None
    assert rep["hypotheses"]["L"] == pytest.approx(1.0, rel=1e-9)


def test_check_out_flag_writes_file(tmp_path):
    m, _ = gen_tree_perturbed(4, 2.0, 11)
    report = tmp_path / "report.json"
    code = main(["check", *write_instance(m, tmp_path), "--out", str(report)])
    assert code == 0
    assert json.loads(report.read_text())["verdict"] == "Certified"


def test_check_missing_file_exit_3(tmp_path):
    m, _ = gen_tree_perturbed(4, 2.0, 11)
    dom, cod, mp = write_instance(m, tmp_path)
    code, out, err = run_cli("check", str(tmp_path / "absent.json"), cod, mp)
    assert code == 3
    assert "error:" in err and "absent.json" in err


def test_check_malformed_json_exit_3(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{\n  broken\n")
    code = main(["check", str(bad), str(bad), str(bad)])
    assert code == 3
    assert "bad.json:2" in capsys.readouterr().err


# -- lift and fiber -----------------------------------------------------------


def test_lift_advances_fundamental_domain(tmp_path):
    m, _ = gen_cycle_cover(6, 3)
    paths = write_instance(m, tmp_path)
    wp = tmp_path / "walk.json"
    bio.save(str(wp), codomain_loop_obj(6, 1))
    code, out, err = run_cli("lift", *paths, str(wp), "--start", '{"v": "d0"}')
    assert code == 0, err
    payload = json.loads(out)
    assert payload["escaped"] is False
    segs = payload["walk"]["segments"]
    assert len(segs) == 6
    assert segs[-1] == ["de5", "+", 0.0, 1.0]


def test_lift_escape_exit_1(tmp_path):
    m, _ = gen_mcsimpleminded(10.0, 3.0)
    paths = write_instance(m, tmp_path)
    wp = tmp_path / "walk.json"
    bio.save(str(wp), codomain_loop_obj(3, 4, start_edge=2, vp="W", ep="c"))
    code, out, err = run_cli("lift", *paths, str(wp), "--start", '{"v": "P5"}')
    assert code == 1, err
    payload = json.loads(out)
    assert payload["escaped"] is True
    assert payload["marker"] == "P10"
    assert payload["remaining"] == pytest.approx(7.0, abs=1e-9)
    assert len(payload["walk"]["segments"]) == 5


def test_lift_start_mismatch_exit_3(tmp_path, capsys):
    m, _ = gen_cycle_cover(6, 3)
    paths = write_instance(m, tmp_path)
    wp = tmp_path / "walk.json"
    bio.save(str(wp), codomain_loop_obj(6, 1))
    # d1 maps to c1, not to the walk start c0
    code = main(["lift", *paths, str(wp), "--start", '{"v": "d1"}'])
    assert code == 3
    assert "error:" in capsys.readouterr().err


def test_lift_bad_start_json_exit_3(tmp_path, capsys):
    m, _ = gen_cycle_cover(6, 3)
    paths = write_instance(m, tmp_path)
    wp = tmp_path / "walk.json"
    bio.save(str(wp), codomain_loop_obj(6, 1))
    code = main(["lift", *paths, str(wp), "--start", "{not json"])
    assert code == 3
    assert "--start" in capsys.readouterr().err


def test_fiber_transport_pairs(tmp_path, capsys):
    m, _ = gen_cycle_cover(6, 3)
    paths = write_instance(m, tmp_path)
    wp = tmp_path / "walk.json"
    bio.save(str(wp), codomain_loop_obj(6, 1))
    code = main(["fiber", *paths, str(wp)])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["escaped"] is False
    got = {row[0]["v"]: row[1]["v"] for row in payload["pairs"]}
    assert got == {"d0": "d6", "d6": "d12", "d12": "d0"}


# -- multiplicity and ahlfors -------------------------------------------------


def test_multiplicity_point_mode(tmp_path, capsys):
    m, _ = gen_cycle_cover(6, 3)
    paths = write_instance(m, tmp_path)
    code = main(["multiplicity", *paths, "--point", '{"v": "c0"}'])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["multiplicity"] == 3
    assert sorted(p["v"] for p in payload["fiber"]) == ["d0", "d12", "d6"]


def test_multiplicity_ball_mode(tmp_path, capsys):
    m, _ = gen_mcsimpleminded(10.0, 3.0)
    paths = write_instance(m, tmp_path)
    code = main(["multiplicity", *paths, "--center", '{"v": "P5"}', "--radius", "5"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["max_multiplicity"] == 3
    assert "v" in payload["at"] or "e" in payload["at"]


def test_multiplicity_requires_a_mode(tmp_path, capsys):
    m, _ = gen_cycle_cover(6, 2)
    paths = write_instance(m, tmp_path)
    assert main(["multiplicity", *paths]) == 3
    assert "either --point" in capsys.readouterr().err
    assert main(["multiplicity", *paths, "--radius", "1"]) == 3
    assert "--center" in capsys.readouterr().err


def test_ahlfors_long_path_interior(tmp_path, capsys):
    gp = tmp_path / "g.json"
    bio.save(str(gp), {
        "vertices": ["p0", "p1", "p2"],
        "edges": [
            {"id": "e0", "a": "p0", "b": "p1", "len": 4.0},
            {"id": "e1", "a": "p1", "b": "p2", "len": 4.0},
        ],
    })
    code = main(["ahlfors", str(gp), "--radii", "1,2"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["C"] == pytest.approx(2.0, rel=1e-9)
    assert payload["radii"] == [1.0, 2.0]


def test_ahlfors_bad_radii_exit_3(tmp_path, capsys):
    gp = tmp_path / "g.json"
    bio.save(str(gp), {
        "vertices": ["a", "b"],
        "edges": [{"id": "ab", "a": "a", "b": "b", "len": 1.0}],
    })
    assert main(["ahlfors", str(gp), "--radii", "1,zap"]) == 3
    assert "--radii" in capsys.readouterr().err


# -- gen ----------------------------------------------------------------------


def test_gen_check_round_trip(tmp_path):
    d = tmp_path / "inst"
    code, out, err = run_cli(
        "gen", "tree_perturbed", "--n", "8", "--seed", "5", "--out-dir", str(d)
    )
    assert code == 0, err
    assert all((d / f).exists() for f in
               ("domain.json", "codomain.json", "map.json", "expected.json"))
    expected = json.loads((d / "expected.json").read_text())
    code, out, err = run_cli(
        "check", str(d / "domain.json"), str(d / "codomain.json"), str(d / "map.json")
    )
    assert code == 0
    assert json.loads(out)["verdict"] == expected["expected"]["verdict"] == "Certified"


def test_gen_regeneration_byte_identical(tmp_path):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    for d in (d1, d2):
        code = main([
            "gen", "cycle_cover", "--k", "6", "--n", "3", "--out-dir", str(d)
        ])
        assert code == 0
    for f in ("domain.json", "codomain.json", "map.json", "expected.json"):
        assert (d1 / f).read_bytes() == (d2 / f).read_bytes()


def test_gen_parameter_validation(tmp_path, capsys):
    assert main(["gen", "tree_perturbed", "--out-dir", str(tmp_path)]) == 3
    assert "--n" in capsys.readouterr().err
    assert main(["gen", "cycle_cover", "--n", "2", "--out-dir", str(tmp_path)]) == 3
    assert "--k" in capsys.readouterr().err
    assert main(["gen", "nonesuch", "--out-dir", str(tmp_path)]) == 3
    assert "unknown generator" in capsys.readouterr().err


# -- argparse edges -----------------------------------------------------------


def test_unknown_subcommand_exit_3():
    code, out, err = run_cli("frobnicate")
    assert code == 3


def test_help_exit_0():
    code, out, err = run_cli("--help")
    assert code == 0
    assert "check" in out and "lift" in out
