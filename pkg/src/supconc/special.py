"""Special functions behind the left-deviation bound: I(t), J(t), the roots t0, t1."""

from __future__ import annotations

import functools
import math
import warnings
from typing import Sequence

import numpy as np

from .bounds import exp_minus_linear, proof_scalars
from .numerics import QuadratureSpec, bisect, cumulative_quadrature, quadrature

J_DOMAIN_MAX = 4.0


class DomainWarning(UserWarning):
    """Evaluation outside the interval on which a function is claimed useful."""


def phi_over_u(u: float) -> float:
    """phi(u)/u, with its limit 1 at u = 0."""
    if u == 0.0:
        return 1.0
    return proof_scalars(u)[1] / u


def one_plus_u_minus_one_exp(u: float) -> float:
    # 1 + (u - 1) e^u = sum_{k>=2} (k - 1) u^k / k!
    if abs(u) < 0.1:
        term = 1.0
        total = 0.0
        for k in range(1, 16):
            term *= u / k
            if k >= 2:
                total += (k - 1) * term
        return total
    return 1.0 + (u - 1.0) * math.exp(u)


def j_integrand(u: float) -> float:
    """(1/2) u^{-2} (e^{2u} - 1)(1 + (u - 1)e^u) e^u, with limit 0 at u = 0."""
    if u == 0.0:
        return 0.0
    # split u^{-2} across the two factors that vanish at 0, so tiny u cannot underflow
    return 0.5 * (math.expm1(2.0 * u) / u) * (one_plus_u_minus_one_exp(u) / u) * math.exp(u)


@functools.cache
def solve_t0() -> float:
    """Positive root of phi(t) = 1, where phi = psi log psi and psi = (e^{2t} + 1)/2."""
    t0 = bisect(lambda t: proof_scalars(t)[1] - 1.0, 0.4, 0.5, tol=0.0)
    assert abs(proof_scalars(t0)[1] - 1.0) < 1e-12
    assert 0.46 <= t0 <= 0.47, t0
    return t0


@functools.cache
def solve_t1() -> float:
    """Positive root of e^t - t - 1 = t/2."""
    t1 = bisect(lambda t: exp_minus_linear(t) - 0.5 * t, 0.7, 0.8, tol=0.0)
    assert abs(exp_minus_linear(t1) - 0.5 * t1) < 1e-12
    assert 0.76 <= t1 <= 0.77, t1
    assert t1 > solve_t0()
    return t1


def integral_I(t: float, spec: QuadratureSpec | None = None) -> float:
    """I(t) = int_0^t phi(u)/u du.

    Defined for all t >= 0, but only used on [0, t0]; larger t emits a
    :class:`DomainWarning`.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t > solve_t0():
        warnings.warn(f"integral_I evaluated at t={t} > t0", DomainWarning, stacklevel=2)
    return quadrature(phi_over_u, 0.0, t, spec)


def integral_J(t: float, spec: QuadratureSpec | None = None) -> float:
    """J(t) = (1/2) int_0^t u^{-2}(e^{2u} - 1)(1 + (u - 1)e^u) e^u du on [0, 4]."""
    if not (0.0 <= t <= J_DOMAIN_MAX):
        raise ValueError(f"integral_J is defined here on [0, 4], got {t}")
    return quadrature(j_integrand, 0.0, t, spec)


def _grid_from_zero(ts: Sequence[float], upper: float, name: str) -> tuple[np.ndarray, np.ndarray]:
    ts = np.asarray(ts, dtype=float)
    if ts.size and (ts.min() < 0 or ts.max() > upper):
        raise ValueError(f"{name} grid must lie in [0, {upper}]")
    order = np.argsort(ts, kind="stable")
    return ts, order


def integral_I_grid(ts: Sequence[float], spec: QuadratureSpec | None = None) -> np.ndarray:
    """I at every point of ``ts`` (any order) by cumulative integration."""
    ts, order = _grid_from_zero(ts, solve_t0(), "I")
    pts = np.concatenate([[0.0], ts[order]])
    vals = cumulative_quadrature(phi_over_u, pts, spec)[1:]
    out = np.empty_like(ts)
    out[order] = vals
    return out


def integral_J_grid(ts: Sequence[float], spec: QuadratureSpec | None = None) -> np.ndarray:
    """J at every point of ``ts`` (any order) by cumulative integration."""
    ts, order = _grid_from_zero(ts, J_DOMAIN_MAX, "J")
    pts = np.concatenate([[0.0], ts[order]])
    vals = cumulative_quadrature(j_integrand, pts, spec)[1:]
    out = np.empty_like(ts)
    out[order] = vals
    return out


def prop42_terms(t: float, I_t: float, J_t: float) -> tuple[float, float]:
    """The two coefficients (of E(Z) and of V_n) in the left log-Laplace bound."""
    mean_coef = -t * math.expm1(-I_t)
    var_coef = t * math.exp(-t) * J_t + exp_minus_linear(t)
    return mean_coef, var_coef


def prop42_left_log_laplace(t: float, mean_z: float, v_n: float) -> float:
    """Bound on log E exp(-tZ) + t E(Z) for 0 <= t <= t0:

    t E(Z)(1 - e^{-I(t)}) + V_n (t e^{-t} J(t) + e^t - t - 1).
    """
    if mean_z < 0 or v_n < 0:
        raise ValueError("mean_z and v_n must be >= 0")
    if not (0.0 <= t <= solve_t0()):
        raise ValueError(f"prop42 bound holds on [0, t0], got t={t}")
    if t == 0.0:
        return 0.0
    mean_coef, var_coef = prop42_terms(t, integral_I(t), integral_J(t))
    return mean_z * mean_coef + v_n * var_coef
