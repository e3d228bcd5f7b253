"""Command-line driver: bound evaluation, inversion, comparison tables, certification.

Exit codes: 0 when every authoritative check passes, 1 when at least one
fails, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Sequence

import numpy as np

from . import bounds as B
from . import verify
from .bounds import BoundParams, TailForm
from .processes import (
    ENUMERATION_CAP,
    EnumerationCapExceeded,
    ScenarioFormatError,
    compute_Vn,
    default_workers,
    enumerate_exact,
    estimate_stats,
    load_scenario,
    validate,
)
from .special import solve_t0, solve_t1

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2

# (column, a, b) for the i.i.d.-style Bennett forms, evaluated with V = v
BENNETT_PRESETS = (("iid_bennett_a1_b1.5", 1.0, 1.5), ("iid_bennett_a1_b1", 1.0, 1.0))
MEDIAN_FOOTNOTE = (
    "median_centered_rademacher bounds P(Z >= median + x) for Rademacher processes, "
    "with V_n in place of v; it is not centered at E(Z)"
)


class UsageError(Exception):
    pass


def fmt(x: float | None) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return format(float(x), ".12g")


def parse_grid(text: str) -> list[float]:
    """``start:stop:count`` (inclusive, evenly spaced) or a comma separated list."""
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise UsageError(f"range grid must be start:stop:count, got {text!r}")
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 1:
                raise UsageError("grid count must be >= 1")
            if count == 1:
                return [start]
            values = np.linspace(start, stop, count).tolist()
        else:
            values = [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse grid {text!r}: {exc}") from None
    if not values:
        raise UsageError("grid is empty")
    if not all(math.isfinite(v) for v in values):
        raise UsageError("grid values must be finite")
    return values


def parse_perturbation(text: str) -> tuple[str, float]:
    name, sep, factor = text.partition("=")
    if not sep:
        raise UsageError(f"--perturb expects NAME=FACTOR, got {text!r}")
    if name not in B.CONSTANTS:
        raise UsageError(f"unknown bound constant {name!r}; choose from {', '.join(B.CONSTANTS)}")
    try:
        value = float(factor)
    except ValueError:
        raise UsageError(f"--perturb factor must be a number, got {factor!r}") from None
    if not (value > 0 and math.isfinite(value)):
        raise UsageError("--perturb factor must be positive")
    return name, value


def _params(args) -> BoundParams:
    try:
        p = BoundParams(args.mean_z, args.v_n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not p.v > 0:
        raise UsageError("need v = v_n + 2 mean_z > 0")
    return p


def _write(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, float) or v is None else v for v in row])
    return buf.getvalue()


# --- subcommands --------------------------------------------------------------


def cmd_bound(args) -> int:
    p = _params(args)
    if not (args.x >= 0 and math.isfinite(args.x)):
        raise UsageError("--x must be finite and >= 0")
    form = TailForm(args.form)
    value = B.tail_bound(args.x, p, form, args.side)
    record = {"side": args.side, "form": form.value, "mean_z": p.mean_z, "v_n": p.v_n, "v": p.v, "x": args.x, "bound": value}
    if args.format == "json":
        _write(args, _json(record))
    elif args.format == "csv":
        _write(args, _csv(list(record), [list(record.values())]))
    else:
        _write(args, f"bound: {fmt(value)}\nv: {fmt(p.v)}\n")
    return EXIT_OK


def cmd_invert(args) -> int:
    p = _params(args)
    if not 0 < args.delta < 1:
        raise UsageError("--delta must lie in (0, 1)")
    form = TailForm(args.form)
    x = B.invert_tail_bound(args.delta, p, form, args.side)
    back = B.tail_bound(x, p, form, args.side)
    record = {"side": args.side, "form": form.value, "mean_z": p.mean_z, "v_n": p.v_n, "v": p.v, "delta": args.delta, "x": x, "bound_at_x": back}
    if args.format == "json":
        _write(args, _json(record))
    elif args.format == "csv":
        _write(args, _csv(list(record), [list(record.values())]))
    else:
        _write(args, f"x: {fmt(x)}\nv: {fmt(p.v)}\nbound(x): {fmt(back)}\n")
    return EXIT_OK


def compare_table(p: BoundParams, xs: Sequence[float]) -> tuple[list[str], list[list[float | None]]]:
    """Rows of every tail bound at each x: columns are named in the returned header."""
    header = ["x"]
    for side in verify.SIDES:
        header += [f"{side}_{form.value}" for form in TailForm] + [f"{side}_chernoff"]
    header += [name for name, _, _ in BENNETT_PRESETS] + ["median_centered_rademacher"]
    rows = []
    for x in xs:
        row: list[float | None] = [x]
        for side in verify.SIDES:
            row += [B.tail_bound(x, p, form, side) for form in TailForm]
            row.append(B.chernoff_optimized_tail(x, p, side)[0])
        row += [B.generic_bennett_tail(x, p.v, a, b) for _, a, b in BENNETT_PRESETS]
        row.append(B.rademacher_tail_bound(x, p.v_n) if p.v_n > 0 else None)
        rows.append(row)
    return header, rows


def cmd_compare(args) -> int:
    p = _params(args)
    xs = parse_grid(args.x_grid)
    if any(x < 0 for x in xs):
        raise UsageError("x grid values must be >= 0")
    header, rows = compare_table(p, xs)
    if args.format == "json":
        doc = {
            "mean_z": p.mean_z,
            "v_n": p.v_n,
            "v": p.v,
            "columns": header,
            "rows": rows,
            "footnotes": {"median_centered_rademacher": MEDIAN_FOOTNOTE},
        }
        _write(args, _json(doc))
    elif args.format == "csv":
        _write(args, _csv(header, rows))
    else:
        cells = [header] + [[fmt(v) for v in row] for row in rows]
        widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
        lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
        lines.append(f"v = {fmt(p.v)} (mean_z {fmt(p.mean_z)}, v_n {fmt(p.v_n)})")
        lines.append(f"* {MEDIAN_FOOTNOTE}")
        _write(args, "\n".join(lines) + "\n")
    return EXIT_OK


def _emit_reports(args, reports, **extra) -> int:
    if args.format == "json":
        _write(args, verify.reports_to_json(reports, **extra))
    elif args.format == "csv":
        _write(args, verify.reports_to_csv(reports))
    else:
        lines = [f"{k}: {fmt(v) if isinstance(v, float) else v}" for k, v in extra.items() if not isinstance(v, dict)]
        for r in reports:
            verdict = "PASS" if r.passed else "FAIL"
            if r.advisory:
                verdict += " (advisory)"
            lines.append(f"{verdict:18s} {r.check_name:26s} worst_margin={fmt(r.worst_margin)}  [{r.domain}]")
            for loc, slack in r.violations[:5]:
                lines.append(f"    violation {loc}: {fmt(slack)}")
            if len(r.violations) > 5:
                lines.append(f"    ... {len(r.violations) - 5} more violations")
            lines += [f"    note: {n}" for n in r.notes]
        _write(args, "\n".join(lines) + "\n")
    failed = any(not r.passed for r in reports if not r.advisory)
    return EXIT_VIOLATION if failed else EXIT_OK


def cmd_simulate(args) -> int:
    try:
        s = load_scenario(args.scenario)
    except ScenarioFormatError as exc:
        raise UsageError(f"{args.scenario}: {exc}") from None
    except OSError as exc:
        raise UsageError(f"cannot read scenario: {exc}") from None
    problems = validate(s)
    if problems:
        shown = "; ".join(
            f"$.functions[{v.function}][{v.coordinate}]: {v.kind} ({fmt(v.detail)})" for v in problems[:5]
        )
        raise UsageError(f"{args.scenario}: {len(problems)} validation problem(s): {shown}")
    xs = parse_grid(args.x_grid)
    if any(x < 0 for x in xs):
        raise UsageError("x grid values must be >= 0")
    t_grid = parse_grid(args.t_grid) if args.t_grid else verify.default_t_grid()
    if any(t < 0 for t in t_grid):
        raise UsageError("t grid values must be >= 0")
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")

    enumerable = s.outcome_count <= ENUMERATION_CAP
    mode = args.mode
    if mode == "auto":
        mode = "exact" if enumerable else "mc"
    if mode == "exact" and not enumerable:
        raise UsageError(f"scenario has {s.outcome_count} outcomes, above the enumeration cap {ENUMERATION_CAP}")

    extra = {"scenario": args.scenario, "kind": s.kind, "mode": mode, "v_n": compute_Vn(s)}
    if args.perturb:
        extra["perturb"] = dict(args.perturb)
    if mode == "exact":
        reports = verify.certify_exact(s, xs, t_grid)
        return _emit_reports(args, reports, **extra)

    summary = enumerate_exact(s) if enumerable else None
    if args.trials < 2 and summary is not None:
        raise UsageError("--trials must be >= 2 to compare moments")
    sim = estimate_stats(s, args.trials, args.seed, workers=args.workers)
    reports = [
        verify.check_tail_bounds(
            s, xs, mode="mc", sim=sim, mean_z=None if summary is None else summary.mean_z
        )
    ]
    if summary is not None:
        reports.append(verify.check_mc_moments(sim, summary))
    extra.update(trials=args.trials, seed=args.seed, simulation=sim.to_dict())
    return _emit_reports(args, reports, **extra)


def cmd_lemmas(args) -> int:
    if args.grid_points < 100:
        raise UsageError("--grid-points must be >= 100")
    reports = verify.lemma_suite(args.grid_points)
    return _emit_reports(args, reports, t0=solve_t0(), t1=solve_t1(), grid_points=args.grid_points)


# --- argument parsing ---------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _finite(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return value


def _perturb(text: str) -> tuple[str, float]:
    try:
        return parse_perturbation(text)
    except UsageError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "csv", "json"), default="text")
    common.add_argument("--out", help="write output here instead of standard output")
    common.add_argument(
        "--perturb",
        action="append",
        type=_perturb,
        default=[],
        metavar="NAME=FACTOR",
        help="multiply a bound constant by FACTOR (fault injection; repeatable)",
    )

    params = argparse.ArgumentParser(add_help=False)
    params.add_argument("--mean-z", type=_finite, required=True, help="E(Z)")
    params.add_argument("--v-n", type=_finite, required=True, help="maximal variance V_n")

    shape = argparse.ArgumentParser(add_help=False)
    shape.add_argument("--side", choices=verify.SIDES, required=True)
    shape.add_argument("--form", choices=[f.value for f in TailForm], required=True)

    parser = _Parser(prog="supconc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bound", parents=[common, params, shape], help="evaluate a tail bound")
    p.add_argument("--x", type=_finite, required=True, help="deviation x >= 0")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("invert", parents=[common, params, shape], help="deviation at which a bound equals delta")
    p.add_argument("--delta", type=_finite, required=True)
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("compare", parents=[common, params], help="table of all tail bounds over an x grid")
    p.add_argument("--x-grid", required=True, help="start:stop:count or comma list")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("simulate", parents=[common], help="certify the bounds on a scenario file")
    p.add_argument("--scenario", required=True)
    p.add_argument("--mode", choices=("auto", "exact", "mc"), default="auto")
    p.add_argument("--x-grid", default="0:3:50", help="deviations to check (default 0:3:50)")
    p.add_argument("--t-grid", help="log-Laplace arguments to check (exact mode)")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=default_workers(), help="threads; never changes output")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("lemmas", parents=[common], help="run the lemma-level inequality suite")
    p.add_argument("--grid-points", type=int, default=512, help="grid points per unit length (>= 100)")
    p.set_defaults(func=cmd_lemmas)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with B.perturbed_constants(**dict(args.perturb)):
            return args.func(args)
    except (UsageError, EnumerationCapExceeded, ValueError, ArithmeticError, OSError) as exc:
        print(f"supconc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
