"""Closed-form concentration bounds for the supremum Z of a bounded empirical process.

Every bound is parameterized by the mean E(Z), the maximal variance V_n and the
variance factor ``v = V_n + 2 E(Z)``.  Tail bounds are returned as
probabilities; log-Laplace bounds as upper bounds on ``log E exp(tZ)`` (upper
side) or on ``log E exp(-tZ) + t E(Z)`` (lower side).

Numerical constants of the bounds live in :data:`CONSTANTS` and are read at
call time, so the verification harness can perturb them (see
:func:`perturbed_constants`).
"""

from __future__ import annotations

import contextlib
import enum
import math
import sys
from dataclasses import dataclass
from typing import Iterator

from . import numerics

__all__ = [
    "BoundParams",
    "TailForm",
    "Saturated",
    "is_saturated",
    "CONSTANTS",
    "LOOSER_DIRECTION",
    "perturbed_constants",
    "exp_minus_linear",
    "bennett_h",
    "proof_scalars",
    "upper_log_laplace_bound",
    "lemma34_log_laplace_bound",
    "lemma34_t_limit",
    "lower_log_laplace_bound",
    "generic_bennett_log_laplace",
    "generic_bennett_tail",
    "upper_tail_exponent",
    "lower_tail_exponent",
    "upper_tail_bound",
    "lower_tail_bound",
    "tail_bound",
    "rademacher_tail_bound",
    "legendre_lemma34",
    "variance_upper_bound",
    "chernoff_optimized_tail",
    "invert_tail_bound",
]

# Largest argument accepted by exp() before overflow (log(DBL_MAX) ~ 709.78).
_EXP_LIMIT = 709.0
# Above this t the double exponential in the upper log-Laplace bound saturates.
UPPER_T_SATURATION = 0.5 * math.log1p(2.0 * _EXP_LIMIT)
LOWER_T_MAX = _EXP_LIMIT / 3.0


class Saturated(float):
    """A float standing in for a value that overflowed double range.

    Compares as ``sys.float_info.max``; check with :func:`is_saturated`.
    """

    saturated = True

    def __new__(cls) -> "Saturated":
        return super().__new__(cls, sys.float_info.max)

    def __repr__(self) -> str:
        return "Saturated()"


def is_saturated(value: float) -> bool:
    return getattr(value, "saturated", False)


# name -> value.  Comments give the expression each constant appears in.
_DEFAULT_CONSTANTS = {
    "upper_a_coef": 0.5,  # (t/2) v (exp((e^{2t} - 1)/2) - 1)
    "lemma34_den": 2.0,  # v t^2 / (2 - 3t)
    "lemma34_lin": 3.0,
    "upper_b_coef": 0.25,  # (x/4) log(1 + 2 log(1 + x/v))
    "upper_b_inner": 2.0,
    "upper_ct_root": 3.0,  # x^2 / (v + sqrt(v^2 + 3vx) + 3x/2)
    "upper_ct_lin": 1.5,
    "upper_cs_var": 2.0,  # x^2 / (2v + 3x)
    "upper_cs_lin": 3.0,
    "lower_a_den": 9.0,  # (v/9)(e^{3t} - 3t - 1)
    "lower_b_den": 9.0,  # (v/9) h(3x/v)
    "lower_ct_root": 2.0,  # x^2 / (v + sqrt(v^2 + 2vx) + x)
    "lower_ct_lin": 1.0,
    "lower_cs_var": 2.0,  # x^2 / (2v + 2x)
    "lower_cs_lin": 2.0,
}
CONSTANTS = dict(_DEFAULT_CONSTANTS)

# +1: increasing the constant makes the bound larger (weaker); -1: the opposite.
LOOSER_DIRECTION = {
    "upper_a_coef": +1,
    "lemma34_den": -1,
    "lemma34_lin": +1,
    "upper_b_coef": -1,
    "upper_b_inner": -1,
    "upper_ct_root": +1,
    "upper_ct_lin": +1,
    "upper_cs_var": +1,
    "upper_cs_lin": +1,
    "lower_a_den": -1,
    "lower_b_den": +1,
    "lower_ct_root": +1,
    "lower_ct_lin": +1,
    "lower_cs_var": +1,
    "lower_cs_lin": +1,
}


@contextlib.contextmanager
def perturbed_constants(**factors: float) -> Iterator[dict]:
    """Temporarily multiply named bound constants by the given factors.

    Used for fault injection only.  Not thread safe: the constants are global.
    """
    unknown = set(factors) - set(CONSTANTS)
    if unknown:
        raise KeyError(f"unknown bound constants: {sorted(unknown)}")
    saved = dict(CONSTANTS)
    try:
        for name, factor in factors.items():
            CONSTANTS[name] = saved[name] * factor
        yield dict(CONSTANTS)
    finally:
        CONSTANTS.clear()
        CONSTANTS.update(saved)


@dataclass(frozen=True)
class BoundParams:
    """The pair (E(Z), V_n); ``v`` is derived, never stored."""

    mean_z: float
    v_n: float

    def __post_init__(self):
        if not (self.mean_z >= 0.0 and math.isfinite(self.mean_z)):
            raise ValueError(f"mean_z must be finite and >= 0, got {self.mean_z}")
        if not (self.v_n >= 0.0 and math.isfinite(self.v_n)):
            raise ValueError(f"v_n must be finite and >= 0, got {self.v_n}")

    @property
    def v(self) -> float:
        return self.v_n + 2.0 * self.mean_z


class TailForm(enum.Enum):
    B = "b"
    C_TIGHT = "c-tight"
    C_SIMPLE = "c-simple"


def exp_minus_linear(x: float) -> float:
    """e^x - 1 - x without cancellation near 0."""
    if abs(x) < 0.1:
        term = x * x / 2.0
        total = term
        for k in range(3, 14):
            term *= x / k
            total += term
        return total
    return math.expm1(x) - x


def bennett_h(x: float) -> float:
    """h(x) = (1 + x) log(1 + x) - x for x >= -1."""
    if x < -1.0:
        raise ValueError(f"bennett_h needs x >= -1, got {x}")
    if x == -1.0:
        return 1.0
    if abs(x) < 0.1:
        # h(x) = sum_{k>=2} (-1)^k x^k / (k (k - 1))
        total = 0.0
        power = -x
        for k in range(2, 18):
            power *= -x  # (-x)^k
            total += power / (k * (k - 1))
        return total
    return (1.0 + x) * math.log1p(x) - x


def proof_scalars(t: float) -> tuple[float, float]:
    """Return (psi, phi) with psi = (e^{2t} + 1)/2 and phi = psi log psi."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    half = math.expm1(2.0 * t) / 2.0
    psi = 1.0 + half
    return psi, psi * math.log1p(half)


def _check_t(t: float) -> None:
    if not (t >= 0.0):
        raise ValueError(f"t must be >= 0, got {t}")


def upper_log_laplace_bound(t: float, p: BoundParams) -> float:
    """Bound on log E exp(tZ): t E(Z) + (t/2) v (exp((e^{2t} - 1)/2) - 1).

    Returns a :class:`Saturated` value once the double exponential overflows.
    """
    _check_t(t)
    inner = math.expm1(2.0 * t) / 2.0
    if inner > _EXP_LIMIT:
        return Saturated()
    value = t * p.mean_z + CONSTANTS["upper_a_coef"] * t * p.v * math.expm1(inner)
    if not math.isfinite(value):
        return Saturated()
    return value


def lemma34_t_limit() -> float:
    """Pole of t^2 / (2 - 3t), i.e. 2/3 unless the constants are perturbed."""
    return CONSTANTS["lemma34_den"] / CONSTANTS["lemma34_lin"]


def lemma34_log_laplace_bound(t: float, p: BoundParams) -> float:
    """t E(Z) + v t^2 / (2 - 3t), valid on 0 <= t < 2/3."""
    _check_t(t)
    if t >= lemma34_t_limit():
        raise ValueError(f"lemma34 bound needs t < {lemma34_t_limit()}, got {t}")
    return t * p.mean_z + p.v * t * t / (CONSTANTS["lemma34_den"] - CONSTANTS["lemma34_lin"] * t)


def lower_log_laplace_bound(t: float, p: BoundParams) -> float:
    """Bound on log E exp(-tZ) + t E(Z): (v/9)(e^{3t} - 3t - 1)."""
    _check_t(t)
    if 3.0 * t > _EXP_LIMIT:
        return Saturated()
    return p.v / CONSTANTS["lower_a_den"] * exp_minus_linear(3.0 * t)


def generic_bennett_log_laplace(t: float, mean_z: float, V: float, a: float, b: float) -> float:
    """Bennett-type log-Laplace form t E(Z) + V a b^{-2} (e^{bt} - bt - 1)."""
    _check_t(t)
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if V < 0:
        raise ValueError("V must be >= 0")
    if b * t > _EXP_LIMIT:
        return Saturated()
    return t * mean_z + V * a / (b * b) * exp_minus_linear(b * t)


def generic_bennett_tail(x: float, V: float, a: float, b: float) -> float:
    """Chernoff tail from the Bennett-type form: exp(-(aV/b^2) h(bx/(aV)))."""
    if x < 0:
        raise ValueError("x must be >= 0")
    if V <= 0 or a <= 0 or b <= 0:
        raise ValueError("V, a and b must be positive")
    return math.exp(-(a * V / (b * b)) * bennett_h(b * x / (a * V)))


def _check_tail_args(x: float, p: BoundParams) -> None:
    if not (x >= 0.0):
        raise ValueError(f"x must be >= 0, got {x}")
    if not (p.v > 0.0):
        raise ValueError("tail bounds need v = v_n + 2 mean_z > 0")


def upper_tail_exponent(x: float, p: BoundParams, form: TailForm) -> float:
    """-log of the right-deviation bound on P(Z >= E(Z) + x)."""
    _check_tail_args(x, p)
    c = CONSTANTS
    v = p.v
    if form is TailForm.B:
        return c["upper_b_coef"] * x * math.log1p(c["upper_b_inner"] * math.log1p(x / v))
    if form is TailForm.C_TIGHT:
        return x * x / (v + math.sqrt(v * v + c["upper_ct_root"] * v * x) + c["upper_ct_lin"] * x)
    if form is TailForm.C_SIMPLE:
        return x * x / (c["upper_cs_var"] * v + c["upper_cs_lin"] * x)
    raise ValueError(f"unknown form {form!r}")


def lower_tail_exponent(x: float, p: BoundParams, form: TailForm) -> float:
    """-log of the left-deviation bound on P(Z <= E(Z) - x)."""
    _check_tail_args(x, p)
    c = CONSTANTS
    v = p.v
    if form is TailForm.B:
        return v / c["lower_b_den"] * bennett_h(3.0 * x / v)
    if form is TailForm.C_TIGHT:
        return x * x / (v + math.sqrt(v * v + c["lower_ct_root"] * v * x) + c["lower_ct_lin"] * x)
    if form is TailForm.C_SIMPLE:
        return x * x / (c["lower_cs_var"] * v + c["lower_cs_lin"] * x)
    raise ValueError(f"unknown form {form!r}")


def upper_tail_bound(x: float, p: BoundParams, form: TailForm) -> float:
    return math.exp(-upper_tail_exponent(x, p, form))


def lower_tail_bound(x: float, p: BoundParams, form: TailForm) -> float:
    return math.exp(-lower_tail_exponent(x, p, form))


def tail_bound(x: float, p: BoundParams, form: TailForm, side: str) -> float:
    if side == "upper":
        return upper_tail_bound(x, p, form)
    if side == "lower":
        return lower_tail_bound(x, p, form)
    raise ValueError(f"side must be 'upper' or 'lower', got {side!r}")


def _tail_exponent(x: float, p: BoundParams, form: TailForm, side: str) -> float:
    if side == "upper":
        return upper_tail_exponent(x, p, form)
    if side == "lower":
        return lower_tail_exponent(x, p, form)
    raise ValueError(f"side must be 'upper' or 'lower', got {side!r}")


def rademacher_tail_bound(x: float, v_n: float) -> float:
    """Median-centered bound exp(-x^2 / (8 V_n)) on P(Z >= m_Z + x).

    Only meaningful for Rademacher processes and centered at a median rather
    than the mean; kept for comparison tables.
    """
    if x < 0:
        raise ValueError("x must be >= 0")
    if v_n <= 0:
        raise ValueError("v_n must be > 0")
    return math.exp(-x * x / (8.0 * v_n))


def legendre_lemma34(x: float) -> float:
    """Convex conjugate of t -> t^2/(2 - 3t) on [0, 2/3).

    Equals (4/9)(1 + 3x/2 - sqrt(1 + 3x)); evaluated in the rationalized form
    x^2 / (1 + 3x/2 + sqrt(1 + 3x)) to avoid cancellation at small x.
    """
    if x < 0:
        raise ValueError("x must be >= 0")
    return x * x / (1.0 + 1.5 * x + math.sqrt(1.0 + 3.0 * x))


def variance_upper_bound(v_n: float, mean_z: float) -> float:
    if v_n < 0 or mean_z < 0:
        raise ValueError("arguments must be nonnegative")
    return v_n + 2.0 * mean_z


def _upper_chernoff_objective(t: float, x: float, p: BoundParams) -> float:
    # upper_log_laplace_bound(t) - t (E(Z) + x), without the cancelling t E(Z)
    return CONSTANTS["upper_a_coef"] * t * p.v * math.expm1(math.expm1(2.0 * t) / 2.0) - t * x


def _lower_chernoff_objective(t: float, x: float, p: BoundParams) -> float:
    return p.v / CONSTANTS["lower_a_den"] * exp_minus_linear(3.0 * t) - t * x


def chernoff_optimized_tail(x: float, p: BoundParams, side: str) -> tuple[float, float]:
    """Optimize the Cramer-Chernoff bound built on the log-Laplace bounds.

    Returns ``(bound, t_star)``.  The search runs over a log-spaced t grid
    followed by golden-section refinement; the explicit choices of t behind
    the closed-form B bounds are added as candidates, so the result never
    exceeds those bounds.
    """
    _check_tail_args(x, p)
    if x == 0.0:
        return 1.0, 0.0
    v = p.v
    if side == "upper":
        objective = lambda t: _upper_chernoff_objective(t, x, p)  # noqa: E731
        t_hi = UPPER_T_SATURATION
        candidates = [0.5 * math.log1p(2.0 * math.log1p(x / v))]
    elif side == "lower":
        objective = lambda t: _lower_chernoff_objective(t, x, p)  # noqa: E731
        t_hi = LOWER_T_MAX
        candidates = [math.log1p(3.0 * x / v) / 3.0]
    else:
        raise ValueError(f"side must be 'upper' or 'lower', got {side!r}")

    t_lo = max(min(1e-3, 1e-3 * x / v), 1e-300)
    u_star, f_star = numerics.minimize_scalar(
        lambda u: objective(math.exp(u)),
        math.log(t_lo),
        math.log(t_hi),
        tol=1e-12,
        grid_points=200,
    )
    best_t, best_f = math.exp(u_star), f_star
    for t in candidates:
        if 0.0 < t <= t_hi:
            f = objective(t)
            if f < best_f:
                best_t, best_f = t, f
    if best_f >= 0.0:
        return 1.0, 0.0
    return math.exp(best_f), best_t


def _closed_form_inverse(L: float, p: BoundParams, form: TailForm, side: str) -> float | None:
    c = CONSTANTS
    v = p.v
    if form is TailForm.C_SIMPLE:
        # x^2 = L (alpha v + beta x)
        alpha, beta = (
            (c["upper_cs_var"], c["upper_cs_lin"])
            if side == "upper"
            else (c["lower_cs_var"], c["lower_cs_lin"])
        )
        return (beta * L + math.sqrt(beta * beta * L * L + 4.0 * alpha * v * L)) / 2.0
    if form is TailForm.C_TIGHT:
        gamma, kappa = (
            (c["upper_ct_root"], c["upper_ct_lin"])
            if side == "upper"
            else (c["lower_ct_root"], c["lower_ct_lin"])
        )
        if gamma != 2.0 * kappa:
            return None
        # exponent = (s - v)^2 / (2 v kappa^2) with s = sqrt(v^2 + 2 kappa v x)
        s = v + kappa * math.sqrt(2.0 * v * L)
        return (s - v) * (s + v) / (2.0 * kappa * v)
    return None


def invert_tail_bound(delta: float, p: BoundParams, form: TailForm, side: str) -> float:
    """Deviation x >= 0 at which the tail bound equals ``delta``."""
    if not (0.0 < delta < 1.0):
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if side not in ("upper", "lower"):
        raise ValueError(f"side must be 'upper' or 'lower', got {side!r}")
    if not (p.v > 0.0):
        raise ValueError("inversion needs v = v_n + 2 mean_z > 0")
    L = -math.log(delta)
    x = _closed_form_inverse(L, p, form, side)
    if x is not None:
        return x

    def excess(x: float) -> float:
        return _tail_exponent(x, p, form, side) - L

    hi = p.v
    while excess(hi) < 0.0:
        hi *= 2.0
        if hi > 1e300:
            raise OverflowError("could not bracket the inverse")
    return numerics.bisect(excess, 0.0, hi, tol=0.0)
