"""Command-line surface: check, lift, fiber, multiplicity, ahlfors, gen.

Exit codes partition outcomes: 0 = Certified (or successful utility run),
1 = HypothesisFailure (or an escaped lift), 2 = Refuted with hypotheses
passing, 3 = input or validation error.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import io as bio
from .corpus import GENERATORS
from .errors import BilipError, EscapedDomain, InputError, StartMismatch
from .graph_map import fiber, max_multiplicity_in_ball, multiplicity
from .lifting import fiber_transport, lift_path
from .metric_graph import ahlfors_constant
from .theorem import verify_theorem


def _write(obj, out: str | None) -> None:
    text = bio.dumps(obj)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_instance(args):
    domain = bio.load_graph(args.domain)
    codomain = bio.load_graph(args.codomain)
    return bio.load_map(args.map, domain, codomain)


def _parse_point(text: str, g, where: str):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as ex:
        raise InputError(f"{where}: {ex.msg}")
    return bio.point_from_obj(obj, g, where)


def cmd_check(args) -> int:
    m = _load_instance(args)
    rep = verify_theorem(m, q=args.q, r_0=args.r0, mesh=args.mesh)
    _write(bio.report_to_obj(rep), args.out)
    return {"Certified": 0, "HypothesisFailure": 1, "Refuted": 2}[rep.verdict]


def cmd_lift(args) -> int:
    m = _load_instance(args)
    walk = bio.walk_from_obj(bio.load_json(args.walk), m.codomain, args.walk)
    start = _parse_point(args.start, m.domain, "--start")
    try:
        lifted = lift_path(m, walk, start)
    except EscapedDomain as ex:
        _write(
            {
                "walk": bio.walk_to_obj(ex.partial),
                "escaped": True,
                "marker": ex.marker,
                "remaining": ex.remaining,
            },
            args.out,
        )
        return 1
    _write({"walk": bio.walk_to_obj(lifted), "escaped": False}, args.out)
    return 0


def cmd_fiber(args) -> int:
    m = _load_instance(args)
    walk = bio.walk_from_obj(bio.load_json(args.walk), m.codomain, args.walk)
    try:
        pairs = fiber_transport(m, walk)
    except EscapedDomain as ex:
        _write({"escaped": True, "marker": ex.marker, "remaining": ex.remaining}, args.out)
        return 1
    _write(
        {"pairs": [[bio.point_to_obj(p), bio.point_to_obj(q)] for p, q in pairs],
         "escaped": False},
        args.out,
    )
    return 0


def cmd_multiplicity(args) -> int:
    m = _load_instance(args)
    if args.radius is not None:
        if args.center is None:
            raise InputError("--radius needs --center")
        x0 = _parse_point(args.center, m.domain, "--center")
        n, at = max_multiplicity_in_ball(m, x0, args.radius)
        _write({"max_multiplicity": n, "at": bio.point_to_obj(at)}, args.out)
        return 0
    if args.point is None:
        raise InputError("give either --point, or --center with --radius")
    y = _parse_point(args.point, m.codomain, "--point")
    _write(
        {"multiplicity": multiplicity(m, y),
         "fiber": [bio.point_to_obj(p) for p in fiber(m, y)]},
        args.out,
    )
    return 0


def cmd_ahlfors(args) -> int:
    g = bio.load_graph(args.graph)
    try:
        radii = [float(tok) for tok in args.radii.split(",") if tok]
    except ValueError:
        raise InputError(f"--radii: expected comma-separated numbers, got {args.radii!r}")
    samples = [g.vertex_point(v) for v in g.vertex_ids]
    if args.samples == "all":
        samples.extend(g.point(e, 0.5) for e in g.edge_ids)
    c = ahlfors_constant(g, args.q, radii, samples)
    _write({"C": c, "q": args.q, "radii": radii}, args.out)
    return 0


def cmd_gen(args) -> int:
    import os

    name = args.generator
    if name not in GENERATORS:
        raise InputError(f"unknown generator {name!r}; have {sorted(GENERATORS)}")
    if name == "tree_perturbed":
        if args.n is None:
            raise InputError("tree_perturbed needs --n")
        params = {"n": args.n, "L_max": args.L_max}
    elif name == "cycle_cover":
        if args.k is None or args.n is None:
            raise InputError("cycle_cover needs --k and --n")
        params = {"k": args.k, "n": args.n}
    else:
        if args.tunnel_len is None or args.circumference is None:
            raise InputError("mcsimpleminded needs --tunnel-len and --circumference")
        params = {"tunnel_len": args.tunnel_len, "tube_circumference": args.circumference}
    m, spec = GENERATORS[name](params, args.seed)
    os.makedirs(args.out_dir, exist_ok=True)
    files = {
        "domain.json": bio.graph_to_obj(m.domain),
        "codomain.json": bio.graph_to_obj(m.codomain),
        "map.json": bio.map_to_obj(m),
        "expected.json": bio.spec_to_obj(spec),
    }
    for fname, obj in files.items():
        bio.save(os.path.join(args.out_dir, fname), obj)
    sys.stdout.write("".join(f"{os.path.join(args.out_dir, f)}\n" for f in files))
    return 0


def _instance_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("domain", help="domain graph JSON file")
    p.add_argument("codomain", help="codomain graph JSON file")
    p.add_argument("map", help="map JSON file")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bilip",
        description="verify that locally bilipschitz graph maps are globally bilipschitz",
    )
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("check", help="run the full verdict pipeline")
    _instance_args(p)
    p.add_argument("--q", type=float, default=1.0, help="regularity exponent (default 1)")
    p.add_argument("--r0", type=float, default=None, help="local scale (default from the map)")
    p.add_argument("--mesh", type=float, default=None, help="net spacing (default r0/16)")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("lift", help="lift a codomain walk from a start point")
    _instance_args(p)
    p.add_argument("walk", help="walk JSON file (on the codomain)")
    p.add_argument("--start", required=True, help='start point JSON, e.g. \'{"v": "P5"}\'')
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("fiber", help="transport the whole fiber along a walk")
    _instance_args(p)
    p.add_argument("walk", help="walk JSON file (on the codomain)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_fiber)

    p = sub.add_parser("multiplicity", help="fiber size at a point or max in a ball")
    _instance_args(p)
    p.add_argument("--point", default=None, help="codomain point JSON")
    p.add_argument("--center", default=None, help="domain ball center point JSON")
    p.add_argument("--radius", type=float, default=None, help="domain ball radius")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_multiplicity)

    p = sub.add_parser("ahlfors", help="measure the q-regularity constant")
    p.add_argument("graph", help="graph JSON file")
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--radii", required=True, help="comma-separated radii")
    p.add_argument("--samples", choices=("vertices", "all"), default="all")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_ahlfors)

    p = sub.add_parser("gen", help="generate a corpus instance deterministically")
    p.add_argument("generator", help="tree_perturbed | cycle_cover | mcsimpleminded")
    p.add_argument("--n", type=int, default=None, help="vertex count / cover degree")
    p.add_argument("--L-max", dest="L_max", type=float, default=3.0)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--k", type=int, default=None, help="codomain cycle edge count")
    p.add_argument("--tunnel-len", dest="tunnel_len", type=float, default=None)
    p.add_argument("--circumference", type=float, default=None)
    p.add_argument("--out-dir", dest="out_dir", default=".")
    p.set_defaults(func=cmd_gen)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as ex:
        return 0 if ex.code == 0 else 3
    try:
        return args.func(args)
    except StartMismatch as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 3
    except BilipError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
