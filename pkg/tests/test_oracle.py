import math

import pytest
from hypothesis import given, settings, strategies as st

from ellipk_bounds import AssemblyMismatch, DomainError, PrecisionContext, constants
from ellipk_bounds.bounds import f1_direct, f1_series_derivative
from ellipk_bounds.oracle import (
    PowerSeries,
    _check_heads,
    build_f_series,
    build_g_series,
    finite_difference,
    series_K,
    series_log_term,
)

HW = PrecisionContext.hardware()
EXT = PrecisionContext.extended(50)
TINY = EXT.num(10) ** -40


def test_series_k_head_coefficients():
    s = series_K(4, EXT)
    pi = EXT.m.pi
    assert s[0] == pi / 2
    assert abs(s[1] - pi / 8) < TINY
    assert abs(s[2] - 9 * pi / 128) < TINY


def test_series_k_evaluates_to_k():
    s = series_K(200, HW)
    assert s.evaluate(0.5) == pytest.approx(1.6857503548125960, rel=1e-15)


def test_series_log_term():
    s = series_log_term(6, EXT)
    pi = EXT.m.pi
    assert s[0] == 8 * pi
    assert abs(s[1] - 5 * pi / 2) < TINY
    assert abs(s[5] - pi / 2) < TINY


def test_f_series_heads():
    table = build_f_series(10, EXT)
    c = constants(EXT)
    assert abs(table.series[0]) < 8 * EXT.m.pi * TINY
    assert abs(table.series[1]) < 8 * EXT.m.pi * TINY
    assert abs(table.series[2] - c.alpha) < TINY
    assert table.reduced().name == "f1"
    assert table.reduced().series[0] == table.series[2]


def test_g_series_heads():
    table = build_g_series(10, EXT)
    c = constants(EXT)
    assert abs(table.series[0]) < 8 * EXT.m.pi * TINY
    assert abs(table.series[1] - c.delta) < TINY
    assert abs(table.series[2] - c.zeta) < TINY
    f = build_f_series(10, EXT)
    for k in range(3, 11):
        assert abs(table.series[k] + f.series[k]) < TINY


def test_f_series_sums_to_f1():
    f1 = build_f_series(120, EXT).reduced().series
    assert abs(f1.evaluate("0.5") - f1_direct("0.5", EXT)) < 1e-30


def test_head_check_flags_a_transcription_slip():
    bad = PowerSeries.from_list([0, 1e-3, 0.5], EXT)
    with pytest.raises(AssemblyMismatch):
        _check_heads(bad, (0, 1), EXT, "f")


def test_order_guards():
    with pytest.raises(DomainError):
        build_f_series(2, EXT)
    with pytest.raises(DomainError):
        series_K(-1, EXT)


def test_series_table_csv():
    text = build_f_series(4, HW).reduced().to_csv()
    lines = text.splitlines()
    assert lines[0] == "index,coefficient"
    assert len(lines) == 4
    assert float(lines[1].split(",")[1]) == pytest.approx(0.5444251570779332, rel=1e-12)


def test_cauchy_product_uses_prefixes_only():
    a = PowerSeries.from_list([1, 2, 3], HW)
    b = PowerSeries.from_list([4, 5, 6], HW)
    assert (a * b).coefficients == (4.0, 13.0, 28.0)
    assert (a * b.truncate(1)).order == 1


_coeffs = st.lists(st.floats(min_value=-10, max_value=10), min_size=5, max_size=5)


@settings(max_examples=50, deadline=None)
@given(_coeffs, _coeffs, _coeffs)
def test_cauchy_product_algebra(xa, xb, xc):
    ctx = PrecisionContext.extended(30)
    a, b, c = (PowerSeries.from_list(v, ctx) for v in (xa, xb, xc))
    tol = ctx.num(10) ** -20
    for lhs, rhs in zip(((a * b) * c).coefficients, (a * (b * c)).coefficients):
        assert abs(lhs - rhs) < tol
    for lhs, rhs in zip((a * b).coefficients, (b * a).coefficients):
        assert abs(lhs - rhs) < tol
    for lhs, rhs in zip((a * (b + c)).coefficients, (a * b + a * c).coefficients):
        assert abs(lhs - rhs) < tol


def test_finite_difference_exact_cases():
    assert finite_difference(lambda x: x, 0.5, 1e-4, 1, HW) == pytest.approx(1.0, rel=1e-12)
    assert finite_difference(lambda x: x * x, 0.5, 1e-4, 2, HW) == pytest.approx(2.0, rel=1e-7)


def test_finite_difference_default_steps():
    assert finite_difference(math.sin, 0.3, ctx=HW) == pytest.approx(math.cos(0.3), rel=1e-8)
    ext = finite_difference(EXT.m.sin, "0.3", ctx=EXT)
    assert abs(ext - EXT.m.cos(EXT.num("0.3"))) < EXT.num(10) ** -30


def test_finite_difference_stencil_must_stay_inside():
    with pytest.raises(DomainError):
        finite_difference(lambda x: x, 0.99995, 1e-4, 1, HW)
    with pytest.raises(ValueError):
        finite_difference(lambda x: x, 0.5, 1e-4, 3, HW)


def test_f1_finite_differences_positive_and_match_series():
    fd1 = finite_difference(lambda x: f1_direct(x, EXT), "0.5", "1e-4", 1, EXT)
    fd2 = finite_difference(lambda x: f1_direct(x, EXT), "0.5", "1e-4", 2, EXT)
    exact = f1_series_derivative("0.5", 200, constants(EXT))
    assert fd1 > 0 and fd2 > 0
    assert abs(fd1 - exact) / exact < 1e-6
