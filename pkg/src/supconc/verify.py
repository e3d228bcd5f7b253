"""Certification of the concentration inequalities against exact and Monte Carlo oracles.

Every check produces a :class:`CheckReport` whose margins are
``bound - observed`` (or the slack of an inequality).  Exact-arithmetic paths
tolerate slack down to -1e-12; checks involving the quadratures I and J
tolerate -1e-9.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import bounds as B
from .bounds import BoundParams, TailForm
from .numerics import minimize_scalar
from .processes import (
    CoordinateDist,
    ExactSummary,
    Scenario,
    SimResult,
    compute_Vn,
    enumerate_exact,
    estimate_stats,
)
from .special import (
    integral_I_grid,
    integral_J_grid,
    prop42_terms,
    solve_t0,
    solve_t1,
    one_plus_u_minus_one_exp,
)

EXACT_TOL = 1e-12
QUADRATURE_TOL = 1e-9
LEGENDRE_TOL = 1e-8
SIDES = ("upper", "lower")


@dataclass
class CheckReport:
    check_name: str
    domain: str
    worst_margin: float
    passed: bool
    tolerance: float
    points: int
    violations: list[tuple[str, float]] = field(default_factory=list)
    advisory: bool = False
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "check_name": self.check_name,
            "domain": self.domain,
            "worst_margin": self.worst_margin if math.isfinite(self.worst_margin) else None,
            "pass": self.passed,
            "tolerance": self.tolerance,
            "points": self.points,
            "violations": [[loc, slack] for loc, slack in self.violations],
            "advisory": self.advisory,
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CheckReport":
        worst = d["worst_margin"]
        return cls(
            check_name=d["check_name"],
            domain=d["domain"],
            worst_margin=math.inf if worst is None else float(worst),
            passed=bool(d["pass"]),
            tolerance=float(d["tolerance"]),
            points=int(d["points"]),
            violations=[(loc, float(slack)) for loc, slack in d["violations"]],
            advisory=bool(d.get("advisory", False)),
            notes=list(d.get("notes", [])),
        )


def make_report(
    name: str,
    domain: str,
    margins: Iterable[tuple[str, float]],
    tolerance: float,
    advisory: bool = False,
    notes: Sequence[str] = (),
) -> CheckReport:
    worst = math.inf
    violations = []
    count = 0
    for loc, slack in margins:
        slack = float(slack)
        count += 1
        if math.isnan(slack):
            violations.append((loc, slack))
            worst = -math.inf
            continue
        worst = min(worst, slack)
        if slack < -tolerance:
            violations.append((loc, slack))
    return CheckReport(
        check_name=name,
        domain=domain,
        worst_margin=worst,
        passed=not violations,
        tolerance=tolerance,
        points=count,
        violations=violations,
        advisory=advisory,
        notes=list(notes),
    )


def _describe(s: Scenario) -> str:
    return f"{s.kind} scenario n={s.n} m={s.m}"


def _fmt(x: float) -> str:
    return format(x, ".12g")


# --- scenario certification ---------------------------------------------------


def check_tail_bounds(
    s: Scenario,
    x_grid: Sequence[float],
    mode: str = "exact",
    trials: int = 100_000,
    seed: int = 0,
    workers: int = 1,
    summary: ExactSummary | None = None,
    sigmas: float = 3.0,
    sim: SimResult | None = None,
    mean_z: float | None = None,
) -> CheckReport:
    """Tail bounds (B, C-tight, C-simple and the optimized Chernoff bound) vs the law of Z.

    In ``mode="exact"`` E(Z) and the tails come from enumeration.  In
    ``mode="mc"`` the tails are simulated (or taken from ``sim``) and compared
    through the one-sided lower confidence bound of each frequency; E(Z) is
    the simulated mean unless ``mean_z`` supplies the exact value.  MC reports
    are always advisory.
    """
    if mode not in ("exact", "mc"):
        raise ValueError(f"mode must be 'exact' or 'mc', got {mode!r}")
    v_n = compute_Vn(s)
    notes = []
    if mode == "exact":
        summary = summary or enumerate_exact(s)
        mean = summary.mean_z
        upper_obs = lambda a: (summary.prob_ge(a), 0.0)  # noqa: E731
        lower_obs = lambda a: (summary.prob_le(a), 0.0)  # noqa: E731
    else:
        if sim is None:
            sim = estimate_stats(s, trials, seed, workers=workers, sigmas=sigmas)
        if mean_z is None:
            mean = max(sim.mean_z, 0.0)
            notes.append(f"E(Z) estimated from {sim.trials} trials (seed {sim.seed})")
        else:
            mean = mean_z
            notes.append("E(Z) exact; tail frequencies from simulation")
        notes.append(f"{sim.trials} trials, seed {sim.seed}, {_fmt(sigmas)}-sigma lower confidence bounds")

        def upper_obs(a):
            t = sim.tail_at(a, sigmas)
            return t.upper_freq, t.upper_radius

        def lower_obs(a):
            t = sim.tail_at(a, sigmas)
            return t.lower_freq, t.lower_radius

    name = "tail_bounds" if mode == "exact" else "tail_bounds_mc"
    domain = f"{_describe(s)}; x in [{_fmt(min(x_grid))}, {_fmt(max(x_grid))}] ({len(x_grid)} pts)"
    p = BoundParams(mean, v_n)
    if not p.v > 0.0:
        notes.append("degenerate scenario (v = 0): Z is constant, bounds skipped")
        return make_report(name, domain, [], EXACT_TOL, advisory=mode != "exact", notes=notes)

    margins = []
    for x in x_grid:
        x = float(x)
        for side in SIDES:
            freq, radius = upper_obs(mean + x) if side == "upper" else lower_obs(mean - x)
            observed = freq - radius
            for form in TailForm:
                bound = B.tail_bound(x, p, form, side)
                margins.append((f"{side}/{form.value}/x={_fmt(x)}", bound - observed))
            bound, _ = B.chernoff_optimized_tail(x, p, side)
            margins.append((f"{side}/chernoff/x={_fmt(x)}", bound - observed))
    return make_report(name, domain, margins, EXACT_TOL, advisory=mode != "exact", notes=notes)


def check_mc_moments(sim: SimResult, summary: ExactSummary, sigmas: float = 4.0) -> CheckReport:
    """Simulated mean and variance of Z within ``sigmas`` standard errors of the exact values."""
    if sim.mean_se is None or sim.var_se is None:
        raise ValueError("moment check needs at least two trials")
    margins = [
        ("mean", sigmas * sim.mean_se - abs(sim.mean_z - summary.mean_z)),
        ("variance", sigmas * sim.var_se - abs(sim.var_z - summary.var_z)),
    ]
    notes = [
        f"mean {_fmt(sim.mean_z)} vs exact {_fmt(summary.mean_z)} (se {_fmt(sim.mean_se)})",
        f"variance {_fmt(sim.var_z)} vs exact {_fmt(summary.var_z)} (se {_fmt(sim.var_se)})",
    ]
    return make_report(
        "mc_moments", f"{sim.trials} trials, {_fmt(sigmas)} standard errors", margins, 0.0, advisory=True, notes=notes
    )


@functools.lru_cache(maxsize=32)
def _prop42_coefficients(ts: tuple[float, ...]) -> tuple[np.ndarray, np.ndarray]:
    arr = np.array(ts)
    I = integral_I_grid(arr)
    J = integral_J_grid(arr)
    coefs = [prop42_terms(t, i, j) for t, i, j in zip(ts, I, J)]
    return np.array([c[0] for c in coefs]), np.array([c[1] for c in coefs])


def check_log_laplace_bounds(
    s: Scenario, t_grid: Sequence[float], summary: ExactSummary | None = None
) -> list[CheckReport]:
    """Exact log-Laplace transform of Z vs its four upper bounds, one report per bound."""
    summary = summary or enumerate_exact(s)
    E = summary.mean_z
    v_n = compute_Vn(s)
    p = BoundParams(E, v_n)
    ts = sorted(float(t) for t in t_grid if t >= 0)
    dom = _describe(s)
    up_a, up_34, low_a = [], [], []
    notes_a = []
    for t in ts:
        L = summary.log_mgf(t)
        bound = B.upper_log_laplace_bound(t, p)
        if B.is_saturated(bound):
            notes_a.append(f"t={_fmt(t)} saturated, skipped")
        else:
            up_a.append((f"t={_fmt(t)}", bound - L))
        if t < B.lemma34_t_limit():
            up_34.append((f"t={_fmt(t)}", B.lemma34_log_laplace_bound(t, p) - L))
        left = summary.log_mgf(-t) + t * E
        bound = B.lower_log_laplace_bound(t, p)
        if not B.is_saturated(bound):
            low_a.append((f"t={_fmt(t)}", bound - left))

    t0 = solve_t0()
    small = tuple(t for t in ts if t <= t0)
    prop = []
    if small:
        mean_coef, var_coef = _prop42_coefficients(small)
        for t, a, b in zip(small, mean_coef, var_coef):
            left = summary.log_mgf(-t) + t * E
            prop.append((f"t={_fmt(t)}", E * a + v_n * b - left))
    return [
        make_report("thm_upper_log_laplace", f"{dom}; t>0", up_a, EXACT_TOL, notes=notes_a),
        make_report("lemma34_log_laplace", f"{dom}; 0<t<2/3", up_34, EXACT_TOL),
        make_report("thm_lower_log_laplace", f"{dom}; t>0", low_a, EXACT_TOL),
        make_report("prop42_log_laplace", f"{dom}; 0<=t<=t0", prop, QUADRATURE_TOL),
    ]


def check_variance_bound(s: Scenario, summary: ExactSummary | None = None) -> CheckReport:
    """Var Z <= V_n + 2E(Z) and V_n <= V <= V_n + 16 E(Z)."""
    summary = summary or enumerate_exact(s)
    v_n = compute_Vn(s)
    E = summary.mean_z
    V = summary.talagrand_v
    margins = [
        ("var_z <= v_n + 2E", B.variance_upper_bound(v_n, E) - summary.var_z),
        ("v_n <= V", V - v_n),
        ("V <= v_n + 16E", v_n + 16.0 * E - V),
    ]
    return make_report("variance_bounds", _describe(s), margins, EXACT_TOL)


def default_t_grid() -> list[float]:
    """Small geometric t values (where the log-Laplace bounds are sharp) plus a uniform grid."""
    small = np.geomspace(1e-3, 0.05, 12)
    regular = np.linspace(0.0, 3.0, 61)
    return sorted(set(small.tolist()) | set(regular.tolist()))


def certify_exact(
    s: Scenario, x_grid: Sequence[float], t_grid: Sequence[float] | None = None
) -> list[CheckReport]:
    """Every exact-mode check on one scenario (enumerated once)."""
    summary = enumerate_exact(s)
    t_grid = default_t_grid() if t_grid is None else t_grid
    return [
        check_tail_bounds(s, x_grid, summary=summary),
        *check_log_laplace_bounds(s, t_grid, summary=summary),
        check_variance_bound(s, summary=summary),
    ]


# --- lemma-level inequalities -------------------------------------------------


def _emx(x: np.ndarray) -> np.ndarray:
    return np.array([B.exp_minus_linear(float(v)) for v in np.ravel(x)]).reshape(np.shape(x))


def _phi(t: np.ndarray) -> np.ndarray:
    half = np.expm1(2.0 * t) / 2.0
    return (1.0 + half) * np.log1p(half)


def _grid(lo: float, hi: float, per_unit: int, include_lo: bool = True) -> np.ndarray:
    count = max(int(math.ceil((hi - lo) * per_unit)), 1)
    g = np.linspace(lo, hi, count + 1)
    return g if include_lo else g[1:]


def _eq311_report(grid_points: int) -> CheckReport:
    # eta(x) = r(t, e^{tx}) with r(t, y) = y log y + (1 + t)(1 - y); eta'(0) = -t^2
    ts = _grid(0.0, 3.0, grid_points, include_lo=False)
    xs = _grid(-3.0, 1.0, grid_points)
    worst, where = math.inf, ""
    violations = []
    for t in ts:
        e = np.exp(t * xs)
        eta = t * xs * e + (t + 1.0) * (1.0 - e)
        slack = -t * t * xs + 0.5 * (t * xs) ** 2 - eta
        i = int(np.argmin(slack))
        if slack[i] < worst:
            worst, where = float(slack[i]), f"t={_fmt(t)},x={_fmt(xs[i])}"
        for j in np.flatnonzero(slack < -EXACT_TOL):
            violations.append((f"t={_fmt(t)},x={_fmt(xs[j])}", float(slack[j])))
    return CheckReport(
        check_name="eq311_eta_bound",
        domain="t in (0,3], x in [-3,1]",
        worst_margin=worst,
        passed=not violations,
        tolerance=EXACT_TOL,
        points=ts.size * xs.size,
        violations=violations,
        notes=[f"worst at {where}"],
    )


def lemma34_coefficients(j_max: int = 30) -> list[Fraction]:
    """b_j = (j-1)!((3/2)^j - (1/2)^j) - 2^{j-1} for j = 2..j_max, exactly."""
    return [
        math.factorial(j - 1) * (Fraction(3, 2) ** j - Fraction(1, 2) ** j) - 2 ** (j - 1)
        for j in range(2, j_max + 1)
    ]


def _lemma34_series_report(j_max: int = 30) -> CheckReport:
    margins = []
    for j, b in enumerate(lemma34_coefficients(j_max), start=2):
        middle = 2 * math.factorial(j - 1) - 2 ** (j - 1)
        margins.append((f"b_{j} >= 0", float(b)))
        margins.append((f"b_{j} >= 2(j-1)! - 2^(j-1)", float(b - middle)))
        margins.append((f"2(j-1)! - 2^(j-1) >= 0 at j={j}", float(middle)))
    report = make_report("lemma34_series_coefficients", f"j in [2,{j_max}], exact rationals", margins, 0.0)
    report.notes.append(f"b_2 = {lemma34_coefficients(2)[0]}")
    return report


def _lemma34_exp_report(grid_points: int) -> CheckReport:
    # exp((e^{2t} - 1)/2) <= 1 + 2t/(2 - 3t) on [0, 2/3)
    ts = _grid(0.0, 2.0 / 3.0, grid_points)[:-1]
    slack = 2.0 * ts / (2.0 - 3.0 * ts) - np.expm1(np.expm1(2.0 * ts) / 2.0)
    return make_report(
        "lemma34_exp_inequality",
        "t in [0,2/3)",
        ((f"t={_fmt(t)}", s) for t, s in zip(ts, slack)),
        EXACT_TOL,
    )


def _lemma45_report(grid_points: int) -> CheckReport:
    t0 = solve_t0()
    ts = _grid(0.0, t0, grid_points)
    phi = _phi(ts)
    margins = [(f"phi>=t, t={_fmt(t)}", s) for t, s in zip(ts, phi - ts)]
    upper = ts * np.exp(2.0 * ts) - ts * ts / 2.0
    margins += [(f"phi<=te^2t-t^2/2, t={_fmt(t)}", s) for t, s in zip(ts, upper - phi)]
    return make_report("lemma45_phi_envelope", "t in [0,t0]", margins, EXACT_TOL)


def _lemma46a_report(grid_points: int) -> CheckReport:
    ts = _grid(0.0, 4.0, grid_points)
    J = integral_J_grid(ts)
    lhs = ts * np.exp(-ts) * J + _emx(ts)
    rhs = _emx(3.0 * ts) / 9.0
    return make_report(
        "lemma46a_J_bound",
        "t in [0,4]",
        ((f"t={_fmt(t)}", s) for t, s in zip(ts, rhs - lhs)),
        QUADRATURE_TOL,
    )


def _lemma46b_report(grid_points: int) -> CheckReport:
    ts = _grid(0.0, solve_t0(), grid_points)
    I = integral_I_grid(ts)
    lhs = -ts * np.expm1(-I)
    rhs = 2.0 * _emx(3.0 * ts) / 9.0
    return make_report(
        "lemma46b_I_bound",
        "t in [0,t0]",
        ((f"t={_fmt(t)}", s) for t, s in zip(ts, rhs - lhs)),
        QUADRATURE_TOL,
    )


def _eq427_report(grid_points: int) -> CheckReport:
    ts = _grid(0.0, 0.999, grid_points)
    slack = ts * ts / (2.0 - 2.0 * ts) - _emx(3.0 * ts) / 9.0
    return make_report(
        "eq427_bennett_vs_quadratic",
        "t in [0,0.999]",
        ((f"t={_fmt(t)}", s) for t, s in zip(ts, slack)),
        EXACT_TOL,
    )


def check_lemma_inequalities(grid_points: int = 512) -> list[CheckReport]:
    """Deterministic grid checks of the analytic lemmas; ``grid_points`` per unit length."""
    if grid_points < 100:
        raise ValueError("grid_points must be >= 100")
    return [
        _eq311_report(grid_points),
        _lemma34_series_report(),
        _lemma34_exp_report(grid_points),
        _lemma45_report(grid_points),
        _lemma46a_report(grid_points),
        _lemma46b_report(grid_points),
        _eq427_report(grid_points),
    ]


def check_roots() -> CheckReport:
    t0, t1 = solve_t0(), solve_t1()
    phi0 = B.proof_scalars(t0)[1]
    margins = [
        ("t0 >= 0.46", t0 - 0.46),
        ("t0 <= 0.47", 0.47 - t0),
        ("t1 >= 0.76", t1 - 0.76),
        ("t1 <= 0.77", 0.77 - t1),
        ("t1 > t0", t1 - t0),
        ("|phi(t0) - 1| < 1e-12", 1e-12 - abs(phi0 - 1.0)),
        ("|e^t1 - 1 - 1.5 t1| < 1e-12", 1e-12 - abs(B.exp_minus_linear(t1) - 0.5 * t1)),
    ]
    report = make_report("roots_t0_t1", "bisection on [0.4,0.5] and [0.7,0.8]", margins, 0.0)
    report.notes.append(f"t0={t0!r}")
    report.notes.append(f"t1={t1!r}")
    return report


def check_lemma44(dist: CoordinateDist, t_grid: Sequence[float]) -> CheckReport:
    """E(tYe^{tY}) - E(e^{tY}) log E(e^{tY}) <= E(Y^2)(1 + (t - 1)e^t), exact over atoms.

    Restricted to Y supported in [-1, 1].
    """
    y = np.asarray(dist.values)
    if np.any(np.abs(y) > 1.0):
        raise ValueError("check_lemma44 needs atoms in [-1, 1]")
    p = np.asarray(dist.probs)
    second = dist.expect(y * y)
    margins = []
    for t in t_grid:
        t = float(t)
        if not t > 0:
            raise ValueError("t must be positive")
        e = np.exp(t * y)
        M = math.fsum(p * e)
        lhs = math.fsum(p * t * y * e) - M * math.log(M)
        rhs = second * one_plus_u_minus_one_exp(t)
        margins.append((f"t={_fmt(t)}", rhs - lhs))
    atoms = ", ".join(f"({_fmt(v)}, {_fmt(q)})" for v, q in zip(dist.values, dist.probs))
    return make_report("lemma44_entropy_bound", f"Y ~ {{{atoms}}}", margins, EXACT_TOL)


def default_two_atom_dists() -> list[CoordinateDist]:
    """24 two-point laws on [-1, 1]: centered and uncentered, symmetric and skewed."""
    out = []
    for a in (1.0, 0.5, 0.25, 0.1):
        for b in (1.0, 0.5, 0.1):
            # centered: a with prob b/(a+b), -b with prob a/(a+b)
            out.append(CoordinateDist((a, -b), (b / (a + b), a / (a + b))))
    for a, b, q in [
        (1.0, -1.0, 0.3),
        (1.0, -1.0, 0.9),
        (1.0, 0.0, 0.5),
        (0.5, -0.2, 0.2),
        (-0.5, -1.0, 0.5),
        (1.0, 0.5, 0.7),
        (0.9, -0.9, 0.01),
        (0.3, -0.6, 0.99),
        (1.0, -0.5, 1.0 / 3.0),
        (0.0, -1.0, 0.4),
        (0.75, 0.25, 0.5),
        (-0.1, -0.9, 0.6),
    ]:
        out.append(CoordinateDist((a, b), (q, 1.0 - q)))
    return out


def check_legendre_equivalence(x_grid: Sequence[float], v_values: Sequence[float] = (0.5, 1.0, 2.0)) -> CheckReport:
    """Numerical conjugate of t -> t^2/(2 - 3t) vs its closed form, and the induced tail.

    The conjugate is found by grid search plus golden-section refinement over
    t in [0, 2/3).  For each v the Chernoff bound exp(-v * conj(x/v)) is also
    compared with the C-tight right-deviation bound.
    """
    margins = []
    hi = 2.0 / 3.0 * (1.0 - 1e-12)
    for x in x_grid:
        x = float(x)
        if not 0.0 <= x <= 50.0:
            raise ValueError("x_grid must lie in [0, 50]")
        _, fmin = minimize_scalar(lambda t: t * t / (2.0 - 3.0 * t) - t * x, 0.0, hi, tol=1e-13, grid_points=400)
        numeric = max(-fmin, 0.0)
        closed = B.legendre_lemma34(x)
        margins.append((f"conjugate x={_fmt(x)}", LEGENDRE_TOL - abs(numeric - closed)))
        for v in v_values:
            chernoff = math.exp(-v * B.legendre_lemma34(x / v))
            tight = B.upper_tail_bound(x, BoundParams(0.0, v), TailForm.C_TIGHT)
            margins.append((f"tail x={_fmt(x)},v={_fmt(v)}", LEGENDRE_TOL - abs(chernoff - tight)))
    # margins are tolerance minus error, so any negative value is a failure
    return make_report("legendre_equivalence", "x in [0,50]", margins, 0.0)


def lemma_suite(grid_points: int = 512) -> list[CheckReport]:
    """Roots, lemma grids, the entropy bound on the default two-point laws, and the conjugate check."""
    t_grid = _grid(0.0, 3.0, grid_points, include_lo=False)
    reports = [check_roots(), *check_lemma_inequalities(grid_points)]
    reports += [check_lemma44(d, t_grid) for d in default_two_atom_dists()]
    reports.append(check_legendre_equivalence(np.linspace(0.0, 50.0, 200)))
    return reports


# --- serialization ------------------------------------------------------------


def reports_to_json(reports: Sequence[CheckReport], **extra) -> str:
    doc = dict(extra)
    doc["reports"] = [r.to_dict() for r in reports]
    doc["all_passed"] = all(r.passed for r in reports if not r.advisory)
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def reports_from_json(text: str) -> list[CheckReport]:
    return [CheckReport.from_dict(d) for d in json.loads(text)["reports"]]


def reports_to_csv(reports: Sequence[CheckReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["check_name", "domain", "worst_margin", "pass"])
    for r in reports:
        worst = _fmt(r.worst_margin) if math.isfinite(r.worst_margin) else ""
        w.writerow([r.check_name, r.domain, worst, "true" if r.passed else "false"])
    return buf.getvalue()
