"""Scalar numerical routines: adaptive Simpson quadrature, bisection, 1-D minimization."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

Func = Callable[[float], float]

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class QuadratureError(RuntimeError):
    pass


class BracketError(ValueError):
    pass


@dataclass(frozen=True)
class QuadratureSpec:
    """Error budget for :func:`quadrature`.

    The target error is ``max(abs_tol, rel_tol * |estimate|)``; ``rel_tol``
    matters only for integrals too large for ``abs_tol`` to be reachable in
    double precision.
    """

    abs_tol: float = 1e-12
    max_subdivisions: int = 60
    rel_tol: float = 1e-14

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if self.rel_tol < 0:
            raise ValueError("rel_tol must be >= 0")


def _simpson(fa: float, fm: float, fb: float, h: float) -> float:
    return h * (fa + 4.0 * fm + fb) / 6.0


def quadrature(f: Func, a: float, b: float, spec: QuadratureSpec | None = None) -> float:
    """Integrate f over [a, b] by adaptive Simpson with Richardson correction.

    Each bisection halves the local error budget.  Raises QuadratureError when
    an interval still fails the test at depth ``spec.max_subdivisions``.
    """
    spec = spec or QuadratureSpec()
    if b < a:
        raise ValueError(f"need a <= b, got [{a}, {b}]")
    if a == b:
        return 0.0
    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    whole = _simpson(fa, fm, fb, b - a)
    tol = max(spec.abs_tol, spec.rel_tol * abs(whole))

    total = 0.0
    # (a, b, fa, fm, fb, whole, tol, depth)
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, est, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        fl = f(0.5 * (lo + mid))
        fr = f(0.5 * (mid + hi))
        left = _simpson(flo, fl, fmid, mid - lo)
        right = _simpson(fmid, fr, fhi, hi - mid)
        diff = left + right - est
        if abs(diff) <= 15.0 * eps:
            total += left + right + diff / 15.0
            continue
        if depth + 1 >= spec.max_subdivisions:
            raise QuadratureError(
                f"no convergence on [{lo}, {hi}] after {spec.max_subdivisions} subdivisions"
            )
        stack.append((lo, mid, flo, fl, fmid, left, eps / 2.0, depth + 1))
        stack.append((mid, hi, fmid, fr, fhi, right, eps / 2.0, depth + 1))
    return total


def cumulative_quadrature(f: Func, points: Sequence[float], spec: QuadratureSpec | None = None) -> np.ndarray:
    """Integrals of f from points[0] to each point, for a nondecreasing grid."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 1 or pts.size == 0:
        raise ValueError("points must be a nonempty 1-D sequence")
    if np.any(np.diff(pts) < 0):
        raise ValueError("points must be nondecreasing")
    out = np.zeros_like(pts)
    acc = 0.0
    for i in range(1, pts.size):
        acc += quadrature(f, float(pts[i - 1]), float(pts[i]), spec)
        out[i] = acc
    return out


def bisect(f: Func, lo: float, hi: float, tol: float = 1e-14, max_iter: int = 400) -> float:
    """Root of f in [lo, hi] by bisection; f(lo) and f(hi) must differ in sign.

    Stops once the bracket is no wider than ``tol`` (``tol=0`` runs to float
    resolution).
    """
    if not hi > lo:
        raise BracketError(f"need lo < hi, got [{lo}, {hi}]")
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0 or math.isnan(flo) or math.isnan(fhi):
        raise BracketError(f"f does not change sign on [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol or mid <= lo or mid >= hi:
            break
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid < 0.0) == (flo < 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def golden_section(f: Func, a: float, b: float, tol: float = 1e-10) -> tuple[float, float]:
    """Golden-section search for a minimizer of a unimodal f on [a, b]."""
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
        if c >= d:  # bracket below float resolution
            break
    return (c, fc) if fc < fd else (d, fd)


def minimize_scalar(
    f: Func, lo: float, hi: float, tol: float = 1e-10, grid_points: int = 64
) -> tuple[float, float]:
    """Grid scan over [lo, hi] then golden-section refinement around the best cell.

    Returns ``(x_star, f_star)``.  For convex f this is the global minimum;
    otherwise it is the minimum near the best grid point.
    """
    if not hi > lo:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    xs = np.linspace(lo, hi, grid_points + 1)
    fs = np.array([f(float(x)) for x in xs])
    i = int(np.nanargmin(fs))
    best_x, best_f = float(xs[i]), float(fs[i])
    a = float(xs[max(i - 1, 0)])
    b = float(xs[min(i + 1, grid_points)])
    x, fx = golden_section(f, a, b, tol)
    if fx < best_f:
        best_x, best_f = x, fx
    return best_x, best_f
