"""Exact certification of every bound on randomly drawn enumerable scenarios.

    python scripts/certify_random_scenarios.py --count 100 --seed 1 --out reports.json
"""

import argparse
import math
import time

import numpy as np

from supconc import verify
from supconc.processes import random_scenario

KINDS = ("general", "rademacher", "set_indexed")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--x-points", type=int, default=50)
    ap.add_argument("--x-max", type=float, default=3.0)
    ap.add_argument("--out", help="write all reports as JSON here")
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    xs = np.linspace(0.0, args.x_max, args.x_points)
    reports, worst, failures = [], math.inf, 0
    start = time.perf_counter()
    for i in range(args.count):
        s = random_scenario(rng, KINDS[i % len(KINDS)])
        batch = verify.certify_exact(s, xs)
        reports += batch
        for r in batch:
            worst = min(worst, r.worst_margin)
            if not r.passed:
                failures += 1
                print(f"scenario {i} ({s.kind}, n={s.n}, m={s.m}): {r.check_name} worst {r.worst_margin:.3g}")
    elapsed = time.perf_counter() - start
    print(f"{args.count} scenarios, {len(reports)} reports, {failures} failures, worst slack {worst:.3g}, {elapsed:.1f}s")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(verify.reports_to_json(reports, seed=args.seed, count=args.count))
    raise SystemExit(1 if failures else 0)


if __name__ == "__main__":
    main()
