"""Closed-form bound families for K(r) and the two monotone auxiliary functions.

Families (all for 0 < r < 1, with r' = sqrt(1 - r^2)):

AR_UPPER      (pi/2)(16 - 5 log r'^2) / (16 + (5 pi - 16) r^2)
AVV_UPPER     log(1 + 4/r') - (log 5 - pi/2)(1 - r)
WCLC_LOWER/UPPER
              log(1 + 4/r') - (log 5 - pi/2) + (pi/8 - 2/5) r^2 + c r^4,
              c = alpha_star / beta_star
NEW_LOWER/UPPER
              max / min of two rational-log expressions built from
              theta, lambda, alpha, beta, delta.

f1 = f / r^4 and g1 = g / r^2 are evaluated either directly through K or by
their Maclaurin series in r^2 with a tail bound.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass
from typing import Any, NamedTuple

from .coefficients import c_values
from .precision import DEFAULT_CONTEXT, DomainError, PrecisionContext, PrecisionLoss
from .special_fn import as_number, ellipk, log_one_minus_r_squared

DIRECT_SERIES_SWITCH = 0.1


class BoundFamily(str, enum.Enum):
    AR_UPPER = "AR_UPPER"
    AVV_UPPER = "AVV_UPPER"
    WCLC_LOWER = "WCLC_LOWER"
    WCLC_UPPER = "WCLC_UPPER"
    NEW_LOWER = "NEW_LOWER"
    NEW_UPPER = "NEW_UPPER"

    @property
    def is_upper(self) -> bool:
        return self.value.endswith("_UPPER")


UPPER_FAMILIES = tuple(f for f in BoundFamily if f.is_upper)
LOWER_FAMILIES = tuple(f for f in BoundFamily if not f.is_upper)

RECIPES = {
    "theta": "pi*(17 - 5*pi)/32",
    "lambda": "8/5 - log(4)",
    "alpha": "85*pi/8 - 185*pi**2/32 + 25*pi**3/32",
    "beta": "(8 - 10*log(2))*pi - 85*pi**2/32 + 25*pi**3/32",
    "delta": "128/5 - 32*log(2) - 17*pi/2 + 5*pi**2/2",
    "zeta": "-128/5 + 32*log(2) + (47/8 - 10*log(2))*pi + 5*pi**2/8",
    "alpha_star": "9*pi/128 - 11/50",
    "beta_star": "2/5 + log(5) - 5*pi/8",
}


@dataclass(frozen=True)
class BoundConstants:
    theta: Any
    lam: Any
    alpha: Any
    beta: Any
    delta: Any
    zeta: Any
    alpha_star: Any
    beta_star: Any
    ctx: PrecisionContext

    recipes = RECIPES

    def as_dict(self) -> dict[str, Any]:
        return {
            "theta": self.theta,
            "lambda": self.lam,
            "alpha": self.alpha,
            "beta": self.beta,
            "delta": self.delta,
            "zeta": self.zeta,
            "alpha_star": self.alpha_star,
            "beta_star": self.beta_star,
        }


@functools.lru_cache(maxsize=16)
def constants(ctx: PrecisionContext = DEFAULT_CONTEXT) -> BoundConstants:
    m = ctx.m
    pi, log2, log5 = m.pi, m.log(2), m.log(5)
    one = ctx.num(1)
    return BoundConstants(
        theta=pi * (17 - 5 * pi) / 32,
        lam=one * 8 / 5 - 2 * log2,
        alpha=85 * pi / 8 - 185 * pi**2 / 32 + 25 * pi**3 / 32,
        beta=(8 - 10 * log2) * pi - 85 * pi**2 / 32 + 25 * pi**3 / 32,
        delta=one * 128 / 5 - 32 * log2 - 17 * pi / 2 + 5 * pi**2 / 2,
        zeta=-one * 128 / 5 + 32 * log2 + (one * 47 / 8 - 10 * log2) * pi + 5 * pi**2 / 8,
        alpha_star=9 * pi / 128 - one * 11 / 50,
        beta_star=one * 2 / 5 + log5 - 5 * pi / 8,
        ctx=ctx,
    )


def _interior(r: Any, ctx: PrecisionContext) -> Any:
    try:
        return as_number(r, ctx, allow_zero=False)
    except DomainError:
        raise DomainError(f"bounds are defined for 0 < r < 1, got {r!r}") from None


def upper_ar(r: Any, ctx: PrecisionContext = DEFAULT_CONTEXT) -> Any:
    x = _interior(r, ctx)
    pi = ctx.m.pi
    return pi / 2 * (16 - 5 * log_one_minus_r_squared(x, ctx)) / (16 + (5 * pi - 16) * x * x)


def upper_avv(r: Any, ctx: PrecisionContext = DEFAULT_CONTEXT) -> Any:
    x = _interior(r, ctx)
    m = ctx.m
    r_prime = m.sqrt((1 - x) * (1 + x))
    return m.log1p(4 / r_prime) - (m.log(5) - m.pi / 2) * (1 - x)


def wclc_bounds(r: Any, c: BoundConstants | None = None) -> tuple[Any, Any]:
    c = c or constants()
    ctx = c.ctx
    x = _interior(r, ctx)
    m = ctx.m
    r2 = x * x
    r_prime = m.sqrt((1 - x) * (1 + x))
    base = m.log1p(4 / r_prime) - (m.log(5) - m.pi / 2) + (m.pi / 8 - ctx.num(2) / 5) * r2
    return base + c.alpha_star * r2 * r2, base + c.beta_star * r2 * r2


class Branches(NamedTuple):
    first: Any
    second: Any


def _shared(x: Any, ctx: PrecisionContext) -> tuple[Any, Any]:
    pi = ctx.m.pi
    numerator = pi * (16 - 5 * log_one_minus_r_squared(x, ctx))
    denominator = 32 + 2 * (5 * pi - 16) * x * x
    return numerator, denominator


def new_upper_branches(r: Any, c: BoundConstants | None = None) -> Branches:
    c = c or constants()
    x = _interior(r, c.ctx)
    num, den = _shared(x, c.ctx)
    r2 = x * x
    u1 = (num - 2 * c.alpha * r2 * r2) / den - c.theta * r2
    u2 = (num + 2 * c.delta * r2) / den - c.lam * r2
    return Branches(u1, u2)


def new_lower_branches(r: Any, c: BoundConstants | None = None) -> Branches:
    c = c or constants()
    x = _interior(r, c.ctx)
    num, den = _shared(x, c.ctx)
    r2 = x * x
    l1 = (num - 2 * (c.alpha + (c.beta - c.alpha) * x) * r2 * r2) / den - c.theta * r2
    l2 = (num + 2 * c.delta * (1 - x) * r2) / den - c.lam * r2
    return Branches(l1, l2)


def new_upper(r: Any, c: BoundConstants | None = None) -> Any:
    return min(new_upper_branches(r, c))


def new_lower(r: Any, c: BoundConstants | None = None) -> Any:
    return max(new_lower_branches(r, c))


def all_bounds(r: Any, c: BoundConstants | None = None) -> dict[BoundFamily, Any]:
    c = c or constants()
    ctx = c.ctx
    wl, wu = wclc_bounds(r, c)
    return {
        BoundFamily.NEW_LOWER: new_lower(r, c),
        BoundFamily.NEW_UPPER: new_upper(r, c),
        BoundFamily.AR_UPPER: upper_ar(r, ctx),
        BoundFamily.AVV_UPPER: upper_avv(r, ctx),
        BoundFamily.WCLC_LOWER: wl,
        BoundFamily.WCLC_UPPER: wu,
    }


# --- f1 and g1 -------------------------------------------------------------


class SeriesValue(NamedTuple):
    value: Any
    tail_bound: Any


@functools.lru_cache(maxsize=32)
def _c_table(n_max: int, ctx: PrecisionContext) -> tuple[Any, ...]:
    return tuple(c_values(n_max, ctx))


def _envelope(n_max: int, ctx: PrecisionContext) -> Any:
    """C with c_n <= C / n^2 beyond n_max.

    Estimated from n^2 c_n over n_max .. n_max + 10 with a 5% margin; n^2 c_n
    settles monotonically, so the window maximum plus margin dominates the tail.
    """
    window = _c_table(n_max + 10, ctx)[n_max - 3 :]
    scaled = [ci * (n_max + i) ** 2 for i, ci in enumerate(window)]
    return max(scaled) * ctx.num(105) / 100


def _tail(n_max: int, x: Any, first_power: int, ctx: PrecisionContext) -> Any:
    """Bound on sum_{n > n_max} (C / n^2) x^(2n - first_power)."""
    big_c = _envelope(n_max, ctx)
    p_series = big_c / n_max
    x2 = x * x
    if x2 >= 1:
        return p_series
    geometric = big_c * x2 ** (n_max + 1) / ((n_max + 1) ** 2 * (1 - x2)) / x ** first_power
    return min(p_series, geometric)


def _series_arg(r: Any, ctx: PrecisionContext) -> Any:
    x = ctx.num(r.r if hasattr(r, "r") else r)
    if not 0 <= x <= 1:
        raise DomainError(f"series form needs 0 <= r <= 1, got {r!r}")
    return x


def f1_series(r: Any, n_max: int = 200, c: BoundConstants | None = None) -> SeriesValue:
    """alpha + sum_{n=3}^{n_max} c_n r^(2n-4), with a bound on the omitted tail."""
    c = c or constants()
    ctx = c.ctx
    if n_max < 3:
        raise DomainError("n_max must be at least 3")
    x = _series_arg(r, ctx)
    x2 = x * x
    total = c.alpha
    power = ctx.num(1)
    for cn in _c_table(n_max, ctx):
        power *= x2
        total += cn * power
    return SeriesValue(total, _tail(n_max, x, 4, ctx) if x > 0 else ctx.num(0))


def g1_series(r: Any, n_max: int = 200, c: BoundConstants | None = None) -> SeriesValue:
    """delta + zeta r^2 - sum_{n=3}^{n_max} c_n r^(2n-2), with a tail bound."""
    c = c or constants()
    ctx = c.ctx
    if n_max < 3:
        raise DomainError("n_max must be at least 3")
    x = _series_arg(r, ctx)
    x2 = x * x
    total = c.delta + c.zeta * x2
    power = x2
    for cn in _c_table(n_max, ctx):
        power *= x2
        total -= cn * power
    return SeriesValue(total, _tail(n_max, x, 2, ctx) if x > 0 else ctx.num(0))


def f1_series_derivative(r: Any, n_max: int = 200, c: BoundConstants | None = None) -> Any:
    """Term-wise derivative d f1 / dr = sum_{n>=3} (2n - 4) c_n r^(2n-5)."""
    c = c or constants()
    ctx = c.ctx
    x = _series_arg(r, ctx)
    total = ctx.num(0)
    for n, cn in enumerate(_c_table(n_max, ctx), start=3):
        total += (2 * n - 4) * cn * x ** (2 * n - 5)
    return total


def g1_series_derivative(r: Any, n_max: int = 200, c: BoundConstants | None = None) -> Any:
    """Term-wise derivative d g1 / dr = 2 zeta r - sum_{n>=3} (2n - 2) c_n r^(2n-3)."""
    c = c or constants()
    ctx = c.ctx
    x = _series_arg(r, ctx)
    total = 2 * c.zeta * x
    for n, cn in enumerate(_c_table(n_max, ctx), start=3):
        total -= (2 * n - 2) * cn * x ** (2 * n - 3)
    return total


def _series_to_precision(series, x: Any, c: BoundConstants) -> Any:
    # Small r only: the geometric tail shrinks like r^(2 n_max), so a few doublings suffice.
    n_max = 32
    while True:
        res = series(x, n_max, c)
        if res.tail_bound <= c.ctx.eps or n_max >= 4096:
            return res.value
        n_max *= 2


def _check_cancellation(parts: tuple[Any, Any], result: Any, ctx: PrecisionContext) -> None:
    scale = max(abs(parts[0]), abs(parts[1]))
    if result == 0 or scale / abs(result) > ctx.num(10) ** (ctx.digits / 2):
        raise PrecisionLoss(
            f"direct evaluation cancelled more than {ctx.digits // 2} digits; use the series form"
        )


def f1_direct(r: Any, ctx: PrecisionContext = DEFAULT_CONTEXT) -> Any:
    """f(r) / r^4 with f = (pi/2)[16 - 5 log(1-r^2)] - [theta r^2 + K(r)][16 + (5 pi - 16) r^2]."""
    c = constants(ctx)
    x = _interior(r, ctx)
    if x < DIRECT_SERIES_SWITCH:
        return _series_to_precision(f1_series, x, c)
    pi = ctx.m.pi
    r2 = x * x
    log_part = pi / 2 * (16 - 5 * log_one_minus_r_squared(x, ctx))
    k_part = (c.theta * r2 + ellipk(x, ctx)) * (16 + (5 * pi - 16) * r2)
    f = log_part - k_part
    _check_cancellation((log_part, k_part), f, ctx)
    return f / (r2 * r2)


def g1_direct(r: Any, ctx: PrecisionContext = DEFAULT_CONTEXT) -> Any:
    """g(r) / r^2 with g = [lambda r^2 + K(r)][16 + (5 pi - 16) r^2] - (pi/2)[16 - 5 log(1-r^2)]."""
    c = constants(ctx)
    x = _interior(r, ctx)
    if x < DIRECT_SERIES_SWITCH:
        return _series_to_precision(g1_series, x, c)
    pi = ctx.m.pi
    r2 = x * x
    log_part = pi / 2 * (16 - 5 * log_one_minus_r_squared(x, ctx))
    k_part = (c.lam * r2 + ellipk(x, ctx)) * (16 + (5 * pi - 16) * r2)
    g = k_part - log_part
    _check_cancellation((log_part, k_part), g, ctx)
    return g / r2


# Endpoint limits, in closed form.
def f1_limits(c: BoundConstants | None = None) -> tuple[Any, Any]:
    c = c or constants()
    return c.alpha, c.beta


def g1_limits(c: BoundConstants | None = None) -> tuple[Any, Any]:
    c = c or constants()
    return c.delta, c.ctx.num(0)
