#!/usr/bin/env python3
"""Time the full verdict pipeline over the standard positive corpus."""
import argparse
import time

from bilip.corpus import build, tree_suite
from bilip.theorem import verify_theorem


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=100, help="instances to run")
    ap.add_argument("--L-max", dest="L_max", type=float, default=3.0)
    ap.add_argument("--top", type=int, default=5, help="slowest instances to list")
    args = ap.parse_args()

    rows = []
    t_start = time.perf_counter()
    for spec in tree_suite(args.count, args.L_max):
        m = build(spec)
        t0 = time.perf_counter()
        rep = verify_theorem(m)
        dt = time.perf_counter() - t0
        rows.append((dt, spec.seed, spec.params["n"], rep.verdict, rep.L))
    total = time.perf_counter() - t_start

    verdicts = {}
    for _, _, _, verdict, _ in rows:
        verdicts[verdict] = verdicts.get(verdict, 0) + 1
    print(f"{len(rows)} instances in {total:.2f}s  verdicts={verdicts}")

    rows.sort(reverse=True)
    print(f"{'time':>8}  {'seed':>4}  {'n':>3}  {'L':>10}  verdict")
    for dt, seed, n, verdict, L in rows[: args.top]:
        print(f"{dt:8.3f}  {seed:4d}  {n:3d}  {L:10.6f}  {verdict}")


if __name__ == "__main__":
    main()
