import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from ellipk_bounds import (
    BoundFamily,
    DomainError,
    PrecisionContext,
    PrecisionLoss,
    constants,
    ellipk_agm,
    f1_direct,
    f1_series,
    g1_direct,
    g1_series,
    new_lower,
    new_upper,
    upper_ar,
    upper_avv,
    wclc_bounds,
)
from ellipk_bounds.bounds import (
    _check_cancellation,
    all_bounds,
    f1_limits,
    f1_series_derivative,
    g1_limits,
    g1_series_derivative,
    new_lower_branches,
    new_upper_branches,
)

HW = PrecisionContext.hardware()
EXT = PrecisionContext.extended(50)
C = constants(EXT)
CH = constants(HW)
K_HALF = 1.6857503548125960428712036578

# Direct 30-digit evaluations of each closed form at r = 1/2 (standalone mpmath script).
AT_HALF = {
    "u1": 1.68601201948034362149235886141,
    "u2": 1.6882479704720603240188829107,
    "l1": 1.68440317010611723766648300552,
    "l2": 1.67734067099172138366233138858,
    "wclc_lower": 1.68570751312090869734581800705,
    "wclc_upper": 1.68852309252621790131345566991,
    "ar": 1.71985978123140978859716380574,
    "avv": 1.70679770842486,
}


def test_constants_printed_prefixes():
    assert float(C.theta) == pytest.approx(0.126845, abs=1e-6)
    assert float(C.lam) == pytest.approx(0.213705, abs=1e-6)
    assert float(C.alpha) == pytest.approx(0.544425, abs=1e-6)
    assert float(C.beta) == pytest.approx(1.364397, abs=1e-6)
    assert float(C.delta) == pytest.approx(1.389763, abs=1e-6)
    assert float(C.zeta) == pytest.approx(-0.569791, abs=1e-6)
    assert float(C.alpha_star) == pytest.approx(0.000893, abs=1e-6)
    assert float(C.beta_star) == pytest.approx(0.0459, abs=1e-4)


def test_constant_identity_holds_to_working_precision():
    assert abs((C.beta - C.alpha) - (C.delta + C.zeta)) < EXT.num(10) ** -45
    assert float(C.beta - C.alpha) == pytest.approx(0.8199721, abs=1e-7)


def test_constants_follow_context_digits():
    c80 = constants(PrecisionContext.extended(80))
    assert abs(c80.alpha - C.alpha) < mpmath.mpf(10) ** -48
    assert constants(EXT) is C


def test_values_at_half():
    u1, u2 = new_upper_branches(0.5, CH)
    l1, l2 = new_lower_branches(0.5, CH)
    wl, wu = wclc_bounds(0.5, CH)
    assert u1 == pytest.approx(AT_HALF["u1"], rel=1e-14)
    assert u2 == pytest.approx(AT_HALF["u2"], rel=1e-14)
    assert l1 == pytest.approx(AT_HALF["l1"], rel=1e-14)
    assert l2 == pytest.approx(AT_HALF["l2"], rel=1e-14)
    assert wl == pytest.approx(AT_HALF["wclc_lower"], rel=1e-14)
    assert wu == pytest.approx(AT_HALF["wclc_upper"], rel=1e-14)
    assert upper_ar(0.5, HW) == pytest.approx(AT_HALF["ar"], rel=1e-14)
    assert upper_avv(0.5, HW) == pytest.approx(AT_HALF["avv"], rel=1e-13)
    assert new_upper(0.5, CH) == u1
    assert new_lower(0.5, CH) == l1


def test_every_family_brackets_k_at_half():
    b = all_bounds(0.5, CH)
    for fam, value in b.items():
        if fam.is_upper:
            assert value > K_HALF, fam
        else:
            assert value < K_HALF, fam


def test_avv_literal_form_is_not_an_upper_bound():
    # Without the "1 +" inside the logarithm the expression drops below K at every r.
    for r in (0.01, 0.3, 0.5, 0.9, 0.999):
        literal = math.log(4 / math.sqrt(1 - r * r)) - (math.log(5) - math.pi / 2) * (1 - r)
        assert literal < ellipk_agm(r, HW)
        assert upper_avv(r, HW) > ellipk_agm(r, HW)


def test_small_r_limits_collapse_to_half_pi():
    r = "1e-6"
    for value in all_bounds(r, C).values():
        assert abs(value - EXT.m.pi / 2) < 1e-6
    wl, wu = wclc_bounds(r, C)
    assert abs(wu - wl) < EXT.num(10) ** -24


def test_avv_diverges_like_asymptotic_form():
    r = 1 - 1e-12
    lead = math.log(4) - 0.5 * math.log((1 - r) * (1 + r))
    assert upper_avv(r, HW) - lead == pytest.approx(0, abs=1e-5)


@pytest.mark.parametrize("bad", [0, 1, -0.2, 1.3])
def test_bound_domain(bad):
    for fn in (upper_ar, upper_avv):
        with pytest.raises(DomainError):
            fn(bad, HW)
    with pytest.raises(DomainError):
        new_upper(bad, CH)
    with pytest.raises(DomainError):
        wclc_bounds(bad, CH)


def test_dominance_over_ar_on_grid():
    for i in range(1, 1000):
        r = i / 1000
        assert new_upper(r, CH) < upper_ar(r, HW), r


def test_sandwich_on_moderate_grid_extended():
    c = constants(PrecisionContext.extended(30))
    ctx = c.ctx
    for i in range(1, 100):
        r = ctx.num(i) / 100
        k = ellipk_agm(r, ctx)
        assert new_lower(r, c) < k < new_upper(r, c), i


def test_f1_limits_and_series_constant_terms():
    assert f1_limits(C) == (C.alpha, C.beta)
    assert g1_limits(C) == (C.delta, 0)
    assert f1_series(0, 10, C).value == C.alpha
    assert g1_series(0, 10, C).value == C.delta


def test_f1_direct_near_endpoints():
    assert abs(f1_direct("0.001", EXT) - C.alpha) < 1e-6
    assert abs(g1_direct("0.001", EXT) - C.delta) < 1e-6
    # f1 approaches beta like (1 - r) log(1/(1 - r)).
    assert abs(f1_direct("0.999999", EXT) - C.beta) < 1e-3
    assert abs(g1_direct("0.999999", EXT)) < 1e-3


def test_series_matches_direct_at_half():
    fs = f1_series(0.5, 60, CH)
    gs = g1_series(0.5, 60, CH)
    assert abs(fs.value - f1_direct(0.5, HW)) < 1e-12
    assert abs(gs.value - g1_direct(0.5, HW)) < 1e-12
    # c_3 dominates the r = 1/2 correction.
    assert fs.value - CH.alpha == pytest.approx(0.22813355540500815 * 0.25, rel=0.2)


@pytest.mark.parametrize("r", ["0.1", "0.3", "0.5", "0.7", "0.9", "0.95"])
def test_series_direct_equivalence_within_tail_bound(r):
    fs = f1_series(r, 400, C)
    gs = g1_series(r, 400, C)
    assert abs(fs.value - f1_direct(r, EXT)) <= max(fs.tail_bound, 1e-12)
    assert abs(gs.value - g1_direct(r, EXT)) <= max(gs.tail_bound, 1e-12)


def test_tail_bound_covers_true_remainder_at_one():
    short = f1_series(1, 500, C)
    assert 0 < C.beta - short.value <= short.tail_bound
    g_short = g1_series(1, 500, C)
    assert 0 < g_short.value <= g_short.tail_bound


def test_series_derivatives_match_finite_difference():
    h = EXT.num(10) ** -12
    x = EXT.num("0.4")
    fd_f = (f1_series(x + h, 300, C).value - f1_series(x - h, 300, C).value) / (2 * h)
    fd_g = (g1_series(x + h, 300, C).value - g1_series(x - h, 300, C).value) / (2 * h)
    assert abs(fd_f - f1_series_derivative(x, 300, C)) < 1e-18
    assert abs(fd_g - g1_series_derivative(x, 300, C)) < 1e-18


def test_cancellation_guard():
    with pytest.raises(PrecisionLoss):
        _check_cancellation((1e10, 1e10), 1e-3, HW)
    _check_cancellation((10.0, 9.0), 1.0, HW)


def test_family_tags():
    assert {f.value for f in BoundFamily} == {
        "AR_UPPER", "AVV_UPPER", "WCLC_LOWER", "WCLC_UPPER", "NEW_LOWER", "NEW_UPPER",
    }


@settings(max_examples=80, deadline=None)
@given(st.floats(min_value=0.02, max_value=0.999))
def test_sandwich_property_hardware(r):
    # Away from r -> 0 the margins dwarf double rounding.
    k = ellipk_agm(r, HW)
    assert new_lower(r, CH) < k < new_upper(r, CH)
    assert new_upper(r, CH) < upper_ar(r, HW)


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=0.1, max_value=0.98))
def test_f1_and_g1_ranges_property(r):
    assert CH.alpha < f1_direct(r, HW) < CH.beta
    assert 0 < g1_direct(r, HW) < CH.delta
