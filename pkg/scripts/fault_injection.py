"""Perturb each bound constant by +/-5% and record which exact checks notice.

Also measures, for each tail form, the smallest ratio between the exponent of
the exact tail and the exponent of the bound over a corpus of enumerable
scenarios.  A ratio r means the bound would survive any tightening of its
exponent by a factor below r.

    python scripts/fault_injection.py --count 27 --seed 2024
"""

import argparse
import math

import numpy as np

from supconc import bounds as B
from supconc import verify
from supconc.bounds import BoundParams, TailForm
from supconc.processes import (
    CoordinateDist,
    Scenario,
    build_rademacher,
    compute_Vn,
    enumerate_exact,
    random_scenario,
)

KINDS = ("general", "rademacher", "set_indexed")


def corpus(count, seed):
    rng = np.random.default_rng(seed)
    out = [random_scenario(rng, KINDS[i % 3]) for i in range(count)]
    return out + [build_rademacher([[1] * 6]), build_rademacher([[1, 1], [-1, -1]])]


def bernoulli_sums(max_n=12):
    """Sums of centered Bernoulli variables and the sup of +/- such sums: skewed, heavy-ish tails."""
    for n in range(1, max_n + 1):
        for p in (0.01, 0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99):
            c = CoordinateDist((0.0, 1.0), (1 - p, p))
            row = np.array([[-p, 1 - p]])
            yield Scenario((c,) * n, (row,) * n)
            yield Scenario((c,) * n, (-row,) * n)
            yield Scenario((c,) * n, (np.vstack([row, -row]),) * n)


def tail_exponent_ratios(scenarios):
    best = {}
    for s in scenarios:
        ex = enumerate_exact(s)
        p = BoundParams(ex.mean_z, compute_Vn(s))
        if not p.v > 0:
            continue
        for z in ex.support:
            for side in verify.SIDES:
                x = z - ex.mean_z if side == "upper" else ex.mean_z - z
                prob = ex.prob_ge(z) if side == "upper" else ex.prob_le(z)
                if x <= 1e-9 or prob <= 0.0:
                    continue
                for form in TailForm:
                    bound_exp = -math.log(B.tail_bound(x, p, form, side))
                    r = -math.log(prob) / bound_exp
                    key = f"{side}/{form.value}"
                    best[key] = min(best.get(key, math.inf), r)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=27)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--factor", type=float, default=0.05)
    args = ap.parse_args()

    scenarios = corpus(args.count, args.seed)
    xs = np.linspace(0.0, 3.0, 50)
    print(f"{'constant':16s} {'looser':>8s} {'tighter':>8s}  checks failing when tightened")
    for name, direction in B.LOOSER_DIRECTION.items():
        row = {}
        for label, sign in (("looser", 1), ("tighter", -1)):
            factor = 1.0 + sign * direction * args.factor
            failed = set()
            with B.perturbed_constants(**{name: factor}):
                for s in scenarios:
                    failed |= {r.check_name for r in verify.certify_exact(s, xs) if not r.passed}
            row[label] = failed
        loose = "pass" if not row["looser"] else "FAIL"
        tight = "caught" if row["tighter"] else "missed"
        print(f"{name:16s} {loose:>8s} {tight:>8s}  {', '.join(sorted(row['tighter']))}")

    print("\nsmallest exact-tail / bound exponent ratio (1.0 would mean the bound is attained):")
    ratios = tail_exponent_ratios(list(scenarios) + list(bernoulli_sums()))
    for key, r in sorted(ratios.items()):
        print(f"  {key:16s} {r:.3f}")


if __name__ == "__main__":
    main()
