"""Acceptance criteria 1-7.  Each test records one pass/fail line (shown in the
terminal summary) before asserting."""

import math
import time

import numpy as np
import pytest

from supconc import bounds as B
from supconc import verify as V
from supconc.bounds import BoundParams, TailForm
from supconc.cli import main
from supconc.processes import (
    build_rademacher,
    enumerate_exact,
    estimate_stats,
    random_scenario,
)
from supconc.special import prop42_left_log_laplace, solve_t0, solve_t1

X_GRID = np.linspace(0.0, 3.0, 50)
KINDS = ("general", "rademacher", "set_indexed")


def certification_corpus(count: int = 27, seed: int = 2024):
    """Random enumerable scenarios cycling through the three kinds."""
    rng = np.random.default_rng(seed)
    return [random_scenario(rng, KINDS[i % 3], max_n=6, max_atoms=4, max_m=8) for i in range(count)]


def test_criterion_1_roots(record_criterion):
    solve_t0.cache_clear()
    solve_t1.cache_clear()
    start = time.perf_counter()
    t0, t1 = solve_t0(), solve_t1()
    elapsed = time.perf_counter() - start
    residual = abs(B.proof_scalars(t0)[1] - 1.0)
    ok = residual < 1e-12 and 0.46 <= t0 <= 0.47 and 0.76 <= t1 <= 0.77 and t1 > t0 and elapsed < 1.0
    record_criterion("1", ok, f"t0={t0:.12g} (residual {residual:.1e}), t1={t1:.12g}, {elapsed:.3f}s")
    assert ok


def test_criterion_2_lemma_suite(record_criterion):
    start = time.perf_counter()
    t_grid = np.arange(1, 3 * 512 + 1) / 512.0  # (0, 3] at 512 points per unit
    reports = V.check_lemma_inequalities(512)
    dists = V.default_two_atom_dists()
    reports += [V.check_lemma44(d, t_grid) for d in dists]
    elapsed = time.perf_counter() - start
    names = {r.check_name for r in reports}
    expected = {
        "eq311_eta_bound",
        "lemma34_series_coefficients",
        "lemma45_phi_envelope",
        "lemma46a_J_bound",
        "lemma46b_I_bound",
        "eq427_bennett_vs_quadratic",
        "lemma44_entropy_bound",
    }
    worst = min(r.worst_margin for r in reports)
    b = V.lemma34_coefficients(30)
    ok = (
        expected <= names
        and all(r.passed for r in reports)
        and worst >= -V.QUADRATURE_TOL
        and len(dists) >= 20
        and b[0] == 0
        and all(x >= 0 for x in b)
        and elapsed < 30.0
    )
    record_criterion("2", ok, f"{len(reports)} reports, worst slack {worst:.3g}, {elapsed:.2f}s")
    assert ok, [r.check_name for r in reports if not r.passed] or names


def test_criterion_3_legendre(record_criterion):
    r = V.check_legendre_equivalence(np.linspace(0.0, 50.0, 200))
    spots = {x: B.legendre_lemma34(x) for x in (0.0, 1.0, 8.0)}
    spot_ok = spots[0.0] == 0.0 and abs(spots[1.0] - 2 / 9) < 1e-15 and abs(spots[8.0] - 32 / 9) < 1e-14
    spot_report = V.check_legendre_equivalence([0.0, 1.0, 8.0])
    ok = r.passed and spot_report.passed and spot_ok
    record_criterion("3", ok, f"200 points, max |error| {V.LEGENDRE_TOL - r.worst_margin:.2g} (tol 1e-8)")
    assert ok


def test_criterion_4_exact_certification(record_criterion):
    corpus = certification_corpus()
    start = time.perf_counter()
    worst = math.inf
    failures = []
    seen = set()
    for s in corpus:
        seen.add(s.kind)
        assert s.n <= 6 and s.m <= 8 and all(c.size <= 4 for c in s.coords)
        for r in V.certify_exact(s, X_GRID):
            worst = min(worst, r.worst_margin)
            if not r.passed:
                failures.append((s.kind, r.check_name, r.worst_margin))
    elapsed = time.perf_counter() - start
    ok = not failures and worst >= -V.EXACT_TOL and len(corpus) >= 25 and seen == set(KINDS) and elapsed < 120
    record_criterion("4", ok, f"{len(corpus)} scenarios x 50 x-points, worst slack {worst:.3g}, {elapsed:.1f}s")
    assert ok, failures


def test_criterion_5_monte_carlo(record_criterion, scenario_dir, tmp_path):
    s = build_rademacher([[1, 1], [-1, -1]])
    exact = enumerate_exact(s)
    start = time.perf_counter()
    sim = estimate_stats(s, 1_000_000, seed=20240601, workers=8)
    tails = V.check_tail_bounds(s, X_GRID, mode="mc", sim=sim, mean_z=exact.mean_z, sigmas=3.0)
    moments = V.check_mc_moments(sim, exact, sigmas=4.0)
    elapsed = time.perf_counter() - start

    outputs = []
    for workers in ("1", "8"):
        out = tmp_path / f"mc_{workers}.json"
        code = main(
            [
                "simulate", "--scenario", str(scenario_dir / "two_function_sign.json"),
                "--mode", "mc", "--trials", "1000000", "--seed", "20240601",
                "--workers", workers, "--format", "json", "--out", str(out),
            ]
        )
        assert code == 0
        outputs.append(out.read_bytes())
    identical = outputs[0] == outputs[1]
    ok = tails.passed and moments.passed and identical and elapsed < 30.0
    record_criterion(
        "5",
        ok,
        f"tails worst margin {tails.worst_margin:.3g}, moments within 4 se, "
        f"workers 1 vs 8 byte-identical={identical}, {elapsed:.2f}s",
    )
    assert ok


def test_criterion_6_dominance_and_round_trip(record_criterion):
    xs = np.geomspace(1e-3, 50.0, 10)
    vs = np.geomspace(1e-2, 50.0, 10)
    worst_dom = math.inf
    for x in xs:
        for v in vs:
            p = BoundParams(0.0, float(v))
            for side in V.SIDES:
                c, _ = B.chernoff_optimized_tail(float(x), p, side)
                for form in TailForm:
                    worst_dom = min(worst_dom, B.tail_bound(float(x), p, form, side) - c)

    worst_rt = 0.0
    for delta in np.geomspace(1e-12, 0.999999, 10):
        for v in vs:
            p = BoundParams(0.0, float(v))
            for side in V.SIDES:
                for form in TailForm:
                    x = B.invert_tail_bound(float(delta), p, form, side)
                    worst_rt = max(worst_rt, abs(B.tail_bound(x, p, form, side) - delta))

    worst_prop = math.inf
    ts = np.linspace(0.0, solve_t0(), 100)
    for mean in (0.0, 10.0):
        for v_n in (0.0, 10.0):
            p = BoundParams(mean, v_n)
            for t in ts:
                left = prop42_left_log_laplace(float(t), mean, v_n)
                worst_prop = min(worst_prop, B.lower_log_laplace_bound(float(t), p) - left)

    ok = worst_dom >= -1e-12 and worst_rt <= 1e-10 and worst_prop >= -V.QUADRATURE_TOL
    record_criterion(
        "6",
        ok,
        f"chernoff slack {worst_dom:.3g} over 100 pairs, round-trip error {worst_rt:.2g}, "
        f"prop42 slack {worst_prop:.3g}",
    )
    assert ok


# --- criterion 7: fault injection ---------------------------------------------


def _fault_corpus():
    # the random corpus plus a single-function sum, where the log-Laplace bounds are sharp at small t
    return certification_corpus() + [build_rademacher([[1] * 6]), build_rademacher([[1, 1], [-1, -1]])]


def _failing_checks(corpus, **factors):
    failed = set()
    with B.perturbed_constants(**factors):
        for s in corpus:
            failed |= {r.check_name for r in V.certify_exact(s, X_GRID) if not r.passed}
    return failed


@pytest.fixture(scope="module")
def fault_corpus():
    return _fault_corpus()


def test_criterion_7_loosened_constants_pass(record_criterion, fault_corpus):
    bad = {}
    for name, direction in B.LOOSER_DIRECTION.items():
        factor = 1.05 if direction > 0 else 0.95
        failed = _failing_checks(fault_corpus, **{name: factor})
        if failed:
            bad[name] = failed
    ok = not bad
    record_criterion("7a", ok, f"all {len(B.LOOSER_DIRECTION)} constants loosened by 5%: failures {bad or 'none'}")
    assert ok


def test_criterion_7_tightened_constants_fail(record_criterion, fault_corpus):
    caught, missed = {}, []
    for name, direction in B.LOOSER_DIRECTION.items():
        factor = 0.95 if direction > 0 else 1.05
        failed = _failing_checks(fault_corpus, **{name: factor})
        if failed:
            caught[name] = sorted(failed)
        else:
            missed.append(name)
    ok = not missed
    record_criterion(
        "7b",
        ok,
        f"{len(caught)}/{len(B.LOOSER_DIRECTION)} constants tightened by 5% detected "
        f"({', '.join(sorted(caught))}); undetected: {', '.join(missed) or 'none'}",
    )
    # the harness must catch at least one tightening; the per-constant demand is checked below
    assert caught
    assert ok, (
        "tightening these constants by 5% leaves every exact check passing: "
        + ", ".join(missed)
        + ". The tail bounds keep a wide margin on enumerable scenarios; see the decisions ledger."
    )
