import math

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supconc import bounds as B
from supconc.bounds import BoundParams, TailForm

mp.mp.dps = 40

UNIT = BoundParams(0.0, 1.0)

# Inputs can be subnormal; cancellations like e^x - 1 - x at x ~ 1e-300 need
# about 700 digits before the result is resolved.
deep = mp.workdps(700)


# --- independent high-precision oracles --------------------------------------


@deep
def mp_h(x):
    x = mp.mpf(x)
    return (1 + x) * mp.log(1 + x) - x


@deep
def mp_upper_exponent(x, v, form):
    x, v = mp.mpf(x), mp.mpf(v)
    if form is TailForm.B:
        return x / 4 * mp.log(1 + 2 * mp.log(1 + x / v))
    if form is TailForm.C_TIGHT:
        return x**2 / (v + mp.sqrt(v**2 + 3 * v * x) + mp.mpf(3) / 2 * x)
    return x**2 / (2 * v + 3 * x)


@deep
def mp_lower_exponent(x, v, form):
    x, v = mp.mpf(x), mp.mpf(v)
    if form is TailForm.B:
        return v / 9 * mp_h(3 * x / v)
    if form is TailForm.C_TIGHT:
        return x**2 / (v + mp.sqrt(v**2 + 2 * v * x) + x)
    return x**2 / (2 * v + 2 * x)


@deep
def mp_upper_log_laplace(t, mean, v):
    t = mp.mpf(t)
    return t * mean + t / 2 * v * (mp.exp((mp.exp(2 * t) - 1) / 2) - 1)


# --- frozen reference values (mpmath, 40 digits) ------------------------------


@pytest.mark.parametrize(
    "x,expected",
    [(0.0, 0.0), (3.0, 2.54517744447956), (1.0, 0.386294361119891), (-1.0, 1.0), (1e-9, 4.999999998333333e-19)],
)
def test_bennett_h_values(x, expected):
    assert B.bennett_h(x) == pytest.approx(expected, rel=1e-12, abs=1e-300)


def test_bennett_h_rejects_below_minus_one():
    with pytest.raises(ValueError):
        B.bennett_h(-1.5)


@given(st.floats(-0.99, 50.0))
def test_bennett_h_matches_mpmath(x):
    assert B.bennett_h(x) == pytest.approx(float(mp_h(x)), rel=1e-12, abs=1e-300)


@given(st.floats(-0.5, 0.5))
def test_exp_minus_linear_matches_mpmath(x):
    with mp.workdps(700):
        ref = float(mp.exp(x) - 1 - x)
    assert B.exp_minus_linear(x) == pytest.approx(ref, rel=1e-13, abs=1e-300)


def test_proof_scalars():
    assert B.proof_scalars(0.0) == (1.0, 0.0)
    psi, phi = B.proof_scalars(0.5)
    assert psi == pytest.approx(1.85914091422952, rel=1e-13)
    assert phi == pytest.approx(1.15288025139340, rel=1e-13)


def test_upper_log_laplace_values():
    assert B.upper_log_laplace_bound(0.0, BoundParams(3.0, 5.0)) == 0.0
    assert B.upper_log_laplace_bound(0.5, UNIT) == pytest.approx(0.340282851942656, rel=1e-13)
    # mean 1, v = 3 (v_n = 1)
    assert B.upper_log_laplace_bound(0.5, BoundParams(1.0, 1.0)) == pytest.approx(1.52084855582797, rel=1e-13)


@given(st.floats(0.0, 3.0), st.floats(0.0, 5.0), st.floats(0.0, 5.0))
def test_upper_log_laplace_matches_mpmath(t, mean, v_n):
    p = BoundParams(mean, v_n)
    ref = float(mp_upper_log_laplace(t, mean, p.v))
    assert B.upper_log_laplace_bound(t, p) == pytest.approx(ref, rel=1e-12, abs=1e-300)


def test_upper_log_laplace_saturates():
    value = B.upper_log_laplace_bound(10.0, UNIT)
    assert B.is_saturated(value)
    assert not B.is_saturated(B.upper_log_laplace_bound(1.0, UNIT))


def test_lemma34_values():
    assert B.lemma34_log_laplace_bound(0.0, UNIT) == 0.0
    assert B.lemma34_log_laplace_bound(0.5, UNIT) == pytest.approx(0.5, rel=1e-15)
    assert B.lemma34_log_laplace_bound(0.6, UNIT) == pytest.approx(1.8, rel=1e-13)
    assert B.lemma34_log_laplace_bound(0.5, UNIT) >= B.upper_log_laplace_bound(0.5, UNIT)
    with pytest.raises(ValueError):
        B.lemma34_log_laplace_bound(2.0 / 3.0, UNIT)


def test_lower_log_laplace_values():
    assert B.lower_log_laplace_bound(0.0, UNIT) == 0.0
    assert B.lower_log_laplace_bound(0.5, UNIT) == pytest.approx(float((mp.exp(1.5) - 2.5) / 9), rel=1e-14)
    assert B.lower_log_laplace_bound(1.0, BoundParams(0.0, 9.0)) == pytest.approx(float(mp.exp(3) - 4), rel=1e-14)


def test_generic_bennett_log_laplace():
    assert B.generic_bennett_log_laplace(0.0, 1.0, 1.0, 1.0, 1.0) == 0.0
    assert B.generic_bennett_log_laplace(1.0, 0.0, 1.0, 1.0, 1.0) == pytest.approx(math.e - 2, rel=1e-14)
    value = B.generic_bennett_log_laplace(1.0, 0.0, 1.0, 1.0, 3.0)
    assert value == pytest.approx(1.78728188035419, rel=1e-12)
    assert value == pytest.approx(B.lower_log_laplace_bound(1.0, UNIT), rel=1e-14)


@pytest.mark.parametrize(
    "form,expected",
    [
        (TailForm.C_SIMPLE, 0.818730753077982),
        (TailForm.C_TIGHT, 0.800737402916808),
        (TailForm.B, 0.804579561744784),
    ],
)
def test_upper_tail_values(form, expected):
    assert B.upper_tail_bound(0.0, UNIT, form) == 1.0
    assert B.upper_tail_bound(1.0, UNIT, form) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize(
    "form,expected",
    [
        (TailForm.B, 0.753672395716670),
        (TailForm.C_SIMPLE, 0.778800783071405),
        (TailForm.C_TIGHT, 0.764946645194924),
    ],
)
def test_lower_tail_values(form, expected):
    assert B.lower_tail_bound(0.0, UNIT, form) == 1.0
    assert B.lower_tail_bound(1.0, UNIT, form) == pytest.approx(expected, rel=1e-13)


@settings(max_examples=200)
@given(st.floats(0.0, 100.0), st.floats(1e-3, 100.0), st.sampled_from(list(TailForm)))
def test_tail_exponents_match_mpmath(x, v, form):
    p = BoundParams(0.0, v)
    assert B.upper_tail_exponent(x, p, form) == pytest.approx(float(mp_upper_exponent(x, v, form)), rel=1e-12, abs=1e-300)
    assert B.lower_tail_exponent(x, p, form) == pytest.approx(float(mp_lower_exponent(x, v, form)), rel=1e-12, abs=1e-300)


def test_tail_bound_rejects_bad_input():
    with pytest.raises(ValueError):
        B.upper_tail_bound(-1.0, UNIT, TailForm.B)
    with pytest.raises(ValueError):
        B.upper_tail_bound(1.0, BoundParams(0.0, 0.0), TailForm.B)
    with pytest.raises(ValueError):
        B.tail_bound(1.0, UNIT, TailForm.B, "middle")
    with pytest.raises(ValueError):
        BoundParams(-1.0, 1.0)


def test_rademacher_tail_values():
    assert B.rademacher_tail_bound(0.0, 1.0) == 1.0
    assert B.rademacher_tail_bound(2.0, 1.0) == pytest.approx(math.exp(-0.5), rel=1e-15)
    assert B.rademacher_tail_bound(4.0, 2.0) == pytest.approx(math.exp(-1.0), rel=1e-15)


def test_legendre_values():
    assert B.legendre_lemma34(0.0) == 0.0
    assert B.legendre_lemma34(1.0) == pytest.approx(2.0 / 9.0, rel=1e-15)
    assert B.legendre_lemma34(8.0) == pytest.approx(32.0 / 9.0, rel=1e-15)


@given(st.floats(0.0, 50.0))
def test_legendre_matches_unrationalized_form(x):
    with mp.workdps(700):
        ref = mp.mpf(4) / 9 * (1 + mp.mpf(3) / 2 * x - mp.sqrt(1 + 3 * mp.mpf(x)))
    assert B.legendre_lemma34(x) == pytest.approx(float(ref), rel=1e-13, abs=1e-300)


def test_variance_upper_bound():
    assert B.variance_upper_bound(0.0, 0.0) == 0.0
    assert B.variance_upper_bound(2.0, 0.0) == 2.0
    assert B.variance_upper_bound(2.0, 1.0) == 4.0


# --- properties ---------------------------------------------------------------

xs = st.floats(0.0, 50.0)
vs = st.floats(1e-2, 50.0)


@given(xs, vs)
def test_tight_below_simple(x, v):
    p = BoundParams(0.0, v)
    for side in ("upper", "lower"):
        tight = B.tail_bound(x, p, TailForm.C_TIGHT, side)
        simple = B.tail_bound(x, p, TailForm.C_SIMPLE, side)
        assert tight <= simple * (1 + 1e-14)


@given(xs, xs, vs, st.sampled_from(list(TailForm)), st.sampled_from(["upper", "lower"]))
def test_tails_nonincreasing_in_x(x1, x2, v, form, side):
    lo, hi = sorted((x1, x2))
    p = BoundParams(0.0, v)
    assert B.tail_bound(hi, p, form, side) <= B.tail_bound(lo, p, form, side) * (1 + 1e-14)


@given(xs, vs, vs, st.sampled_from(list(TailForm)), st.sampled_from(["upper", "lower"]))
def test_tails_nondecreasing_in_v(x, v1, v2, form, side):
    lo, hi = sorted((v1, v2))
    assert B.tail_bound(x, BoundParams(0.0, lo), form, side) <= B.tail_bound(x, BoundParams(0.0, hi), form, side) * (1 + 1e-14)


@given(st.floats(0.0, 0.66), st.floats(0.0, 5.0), st.floats(0.0, 5.0))
def test_lemma34_not_below_upper_log_laplace(t, mean, v_n):
    # the (a) bound is the sharper one on [0, 2/3)
    p = BoundParams(mean, v_n)
    assert B.upper_log_laplace_bound(t, p) <= B.lemma34_log_laplace_bound(t, p) * (1 + 1e-13) + 1e-300


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-3, 30.0), st.floats(1e-2, 30.0), st.sampled_from(["upper", "lower"]))
def test_chernoff_dominates_closed_forms(x, v, side):
    p = BoundParams(0.0, v)
    bound, t_star = B.chernoff_optimized_tail(x, p, side)
    assert 0.0 <= bound <= 1.0 and t_star >= 0.0
    for form in TailForm:
        assert bound <= B.tail_bound(x, p, form, side) * (1 + 1e-12)


def test_chernoff_examples():
    assert B.chernoff_optimized_tail(0.0, UNIT, "upper") == (1.0, 0.0)
    assert B.chernoff_optimized_tail(1.0, UNIT, "upper")[0] <= 0.800737402916808
    assert B.chernoff_optimized_tail(1.0, UNIT, "lower")[0] <= 0.764946645194924


def test_lower_chernoff_equals_form_b():
    # the lower log-Laplace bound is a Bennett form, whose Legendre transform is exact
    for x in (0.1, 1.0, 7.0):
        bound, t_star = B.chernoff_optimized_tail(x, UNIT, "lower")
        assert bound == pytest.approx(B.lower_tail_bound(x, UNIT, TailForm.B), rel=1e-10)
        assert t_star == pytest.approx(math.log1p(3 * x) / 3, rel=1e-5)


# --- inversion ----------------------------------------------------------------


def test_invert_examples():
    assert B.invert_tail_bound(math.exp(-0.2), UNIT, TailForm.C_SIMPLE, "upper") == pytest.approx(1.0, abs=1e-14)
    assert B.invert_tail_bound(math.exp(-0.25), UNIT, TailForm.C_SIMPLE, "lower") == pytest.approx(1.0, abs=1e-14)
    assert B.invert_tail_bound(0.999999, UNIT, TailForm.B, "upper") < 0.01
    for bad in (0.0, 1.0, -0.5, 2.0):
        with pytest.raises(ValueError):
            B.invert_tail_bound(bad, UNIT, TailForm.B, "upper")


@settings(max_examples=200, deadline=None)
@given(
    st.floats(1e-12, 1 - 1e-9),
    st.floats(1e-2, 100.0),
    st.sampled_from(list(TailForm)),
    st.sampled_from(["upper", "lower"]),
)
def test_invert_round_trip(delta, v, form, side):
    p = BoundParams(0.0, v)
    x = B.invert_tail_bound(delta, p, form, side)
    assert x >= 0.0
    assert abs(B.tail_bound(x, p, form, side) - delta) <= 1e-10


def test_inverse_uses_perturbed_constants():
    # the C-tight closed form needs root == 2 * lin; a perturbation falls back to bisection
    with B.perturbed_constants(upper_ct_root=1.1):
        x = B.invert_tail_bound(0.3, UNIT, TailForm.C_TIGHT, "upper")
        assert B.upper_tail_bound(x, UNIT, TailForm.C_TIGHT) == pytest.approx(0.3, abs=1e-12)


# --- constants registry -------------------------------------------------------


def test_perturbed_constants_restores():
    before = dict(B.CONSTANTS)
    with B.perturbed_constants(upper_cs_lin=2.0) as current:
        assert current["upper_cs_lin"] == 6.0
        assert B.upper_tail_bound(1.0, UNIT, TailForm.C_SIMPLE) == pytest.approx(math.exp(-1 / 8))
    assert B.CONSTANTS == before
    with pytest.raises(KeyError):
        with B.perturbed_constants(bogus=1.0):
            pass


@pytest.mark.parametrize("name", sorted(B.LOOSER_DIRECTION))
def test_looser_direction_is_looser(name):
    """Moving a constant in its declared looser direction never shrinks any bound."""
    factor = 1.05 if B.LOOSER_DIRECTION[name] > 0 else 0.95
    p = BoundParams(0.5, 1.0)

    def snapshot():
        out = []
        for x in (0.1, 1.0, 5.0):
            for side in ("upper", "lower"):
                out += [B.tail_bound(x, p, f, side) for f in TailForm]
        for t in (0.05, 0.3, 0.6):
            out += [
                B.upper_log_laplace_bound(t, p),
                B.lemma34_log_laplace_bound(t, p),
                B.lower_log_laplace_bound(t, p),
            ]
        return out

    base = snapshot()
    with B.perturbed_constants(**{name: factor}):
        loose = snapshot()
    assert all(b2 >= b1 for b1, b2 in zip(base, loose))
    assert any(b2 > b1 for b1, b2 in zip(base, loose))


def test_saturated_marker():
    s = B.Saturated()
    assert B.is_saturated(s) and float(s) > 1e300
    assert not B.is_saturated(1.0)
