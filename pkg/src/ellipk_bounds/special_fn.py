"""Numeric kernel: Pochhammer symbols, Gamma ratios and three evaluators of K(r).

K(r) = int_0^{pi/2} (1 - r^2 sin^2 t)^{-1/2} dt is computed by

* ``ellipk_series``     -- the hypergeometric series (pi/2) F(1/2, 1/2; 1; r^2),
* ``ellipk_agm``        -- pi / (2 AGM(1, sqrt(1 - r^2))),
* ``ellipk_quadrature`` -- adaptive Gauss-Kronrod on the defining integral.

The first two run in any :class:`PrecisionContext`; quadrature is a double
precision oracle kept deliberately independent of the other two.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Any, Iterator, NamedTuple

from .precision import (
    DEFAULT_CONTEXT,
    HARDWARE_CONTEXT,
    ConvergenceTooSlow,
    DomainError,
    PrecisionContext,
    ToleranceNotMet,
)

SERIES_MAX_TERMS = 200_000
SERIES_AGM_SWITCH = 0.9
QUADRATURE_R_MAX = 1.0 - 1e-8


@dataclass(frozen=True)
class Modulus:
    """An elliptic modulus r with 0 <= r < 1."""

    r: float

    def __post_init__(self) -> None:
        x = float(self.r)
        if not math.isfinite(x) or x < 0.0 or x >= 1.0:
            raise DomainError(f"modulus must satisfy 0 <= r < 1, got {self.r!r}")

    @property
    def interior(self) -> bool:
        return 0.0 < float(self.r) < 1.0


def _unwrap(r: Any) -> Any:
    return r.r if isinstance(r, Modulus) else r


def as_number(r: Any, ctx: PrecisionContext, *, allow_zero: bool = True) -> Any:
    """Validate a modulus and convert it to ``ctx``'s number type."""
    x = ctx.num(_unwrap(r))
    lo_ok = x >= 0 if allow_zero else x > 0
    if not (lo_ok and x < 1):
        interval = "[0, 1)" if allow_zero else "(0, 1)"
        raise DomainError(f"r must lie in {interval}, got {_unwrap(r)!r}")
    return x


def pochhammer(a: Any, n: int, ctx: PrecisionContext = DEFAULT_CONTEXT) -> Any:
    """Rising factorial (a, n) = a (a+1) ... (a+n-1), with (a, 0) = 1 for a != 0."""
    if n < 0 or int(n) != n:
        raise DomainError(f"n must be a nonnegative integer, got {n!r}")
    a = ctx.num(a)
    if n == 0:
        if a == 0:
            raise DomainError("(0, 0) is left undefined")
        return ctx.num(1)
    out = ctx.num(1)
    for k in range(int(n)):
        out *= a + k
    return out


def gamma_half_ratios(n_max: int, ctx: PrecisionContext = DEFAULT_CONTEXT) -> Iterator[Any]:
    """Yield Gamma(n - 1/2) / Gamma(n) for n = 1 .. n_max.

    Uses ratio(1) = sqrt(pi) and ratio(n) = ratio(n-1) (n - 3/2) / (n - 1),
    so nothing overflows and no large-argument Gamma is evaluated.
    """
    m = ctx.m
    ratio = m.sqrt(m.pi)
    for n in range(1, n_max + 1):
        if n > 1:
            ratio = ratio * (ctx.num(2 * n - 3) / 2) / (n - 1)
        yield ratio


def gamma_half_ratio(n: int, ctx: PrecisionContext = DEFAULT_CONTEXT) -> Any:
    """Gamma(n - 1/2) / Gamma(n) for a positive integer n."""
    if n < 1 or int(n) != n:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    for value in gamma_half_ratios(int(n), ctx):
        pass
    return value


def log_one_minus_r_squared(r: Any, ctx: PrecisionContext = DEFAULT_CONTEXT) -> Any:
    """log(1 - r^2) without cancellation at either end of [0, 1)."""
    x = as_number(r, ctx)
    m = ctx.m
    if x < 0.5:
        return m.log1p(-x * x)
    # 1 - r is exact here (Sterbenz), so the product keeps full relative accuracy.
    return m.log(1 - x) + m.log1p(x)


class SeriesResult(NamedTuple):
    value: Any
    terms: int
    tail_bound: Any


def ellipk_series_detail(
    r: Any,
    tol: Any = None,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
    max_terms: int = SERIES_MAX_TERMS,
) -> SeriesResult:
    """Hypergeometric series for K(r) together with the rigorous tail bound used to stop."""
    x = as_number(r, ctx)
    m = ctx.m
    tol = ctx.num(tol) if tol is not None else ctx.eps
    if tol <= 0:
        raise DomainError("tol must be positive")
    half_pi = m.pi / 2
    x2 = x * x
    if x2 == 0:
        return SeriesResult(half_pi, 1, ctx.num(0))
    # Term ratios ((n+1/2)/(n+1))^2 r^2 increase towards r^2, so after term t_n
    # the remainder is at most t_n r^2 / (1 - r^2).
    geometric = x2 / (1 - x2)
    term = ctx.num(1)
    total = ctx.num(1)
    for n in range(max_terms):
        half = ctx.num(2 * n + 1) / (2 * n + 2)
        term = term * half * half * x2
        total += term
        tail = term * geometric
        if half_pi * tail < tol:
            return SeriesResult(half_pi * total, n + 2, half_pi * tail)
    raise ConvergenceTooSlow(
        f"series for K({_unwrap(r)!r}) needs more than {max_terms} terms; use the AGM"
    )


def ellipk_series(
    r: Any,
    tol: Any = None,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
    max_terms: int = SERIES_MAX_TERMS,
) -> Any:
    return ellipk_series_detail(r, tol, ctx, max_terms).value


def ellipk_agm(r: Any, ctx: PrecisionContext = DEFAULT_CONTEXT) -> Any:
    """K(r) = pi / (2 AGM(1, sqrt(1 - r^2)))."""
    x = as_number(r, ctx)
    m = ctx.m
    a = ctx.num(1)
    b = m.sqrt((1 - x) * (1 + x))
    eps = ctx.eps
    # Quadratic convergence: 2 log2(digits) steps suffice; the cap only guards loops.
    for _ in range(200):
        if abs(a - b) <= 4 * eps * a:
            break
        a, b = (a + b) / 2, m.sqrt(a * b)
    return m.pi / (a + b)


# Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)


def _gauss_kronrod(f, a: float, b: float) -> tuple[float, float]:
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fc = f(center)
    kronrod = fc * _WGK[7]
    gauss = fc * _WG[3]
    for j in range(7):
        dx = half * _XGK[j]
        pair = f(center - dx) + f(center + dx)
        kronrod += _WGK[j] * pair
        if j % 2 == 1:
            gauss += _WG[j // 2] * pair
    return kronrod * half, abs((kronrod - gauss) * half)


def ellipk_quadrature(r: Any, tol: float = 1e-12, max_panels: int = 4000) -> float:
    """Adaptive Gauss-Kronrod (G7/K15) integration of the defining integral.

    Panels are bisected largest-error first until the summed error estimate
    drops below ``tol``. Hardware precision only.
    """
    x = float(_unwrap(r))
    if not (0.0 <= x <= QUADRATURE_R_MAX):
        raise DomainError(f"quadrature needs 0 <= r <= 1 - 1e-8, got {x!r}")
    if tol <= 0:
        raise DomainError("tol must be positive")
    k2 = x * x
    kp2 = (1.0 - x) * (1.0 + x)

    # 1 - r^2 sin^2 t rewritten as r'^2 + r^2 cos^2 t: no cancellation near t = pi/2.
    def integrand(t: float) -> float:
        c = math.cos(t)
        return 1.0 / math.sqrt(kp2 + k2 * c * c)

    value, err = _gauss_kronrod(integrand, 0.0, 0.5 * math.pi)
    # Max-heap on panel error (negated for heapq).
    panels = [(-err, 0.0, 0.5 * math.pi, value)]
    total_err = err
    while total_err > tol:
        if len(panels) >= max_panels:
            raise ToleranceNotMet(
                f"quadrature for K({x!r}) stalled at error {total_err:.3g} > {tol:.3g}"
            )
        _, a, b, _ = heapq.heappop(panels)
        mid = 0.5 * (a + b)
        left, el = _gauss_kronrod(integrand, a, mid)
        right, er = _gauss_kronrod(integrand, mid, b)
        heapq.heappush(panels, (-el, a, mid, left))
        heapq.heappush(panels, (-er, mid, b, right))
        total_err = math.fsum(-p[0] for p in panels)
    return math.fsum(p[3] for p in panels)


class KEvaluation(NamedTuple):
    value: Any
    method: str
    error_estimate: Any


def ellipk_eval(
    r: Any,
    method: str = "auto",
    ctx: PrecisionContext = DEFAULT_CONTEXT,
    tol: Any = None,
) -> KEvaluation:
    """Evaluate K(r) by name, reporting the method actually used and an error estimate."""
    x = as_number(r, ctx)
    if method == "auto":
        method = "series" if x <= SERIES_AGM_SWITCH else "agm"
    if method == "series":
        res = ellipk_series_detail(x, tol, ctx)
        return KEvaluation(res.value, "series", res.tail_bound + ctx.eps * res.terms * res.value)
    if method == "agm":
        value = ellipk_agm(x, ctx)
        return KEvaluation(value, "agm", 16 * ctx.eps * value)
    if method == "quadrature":
        qtol = 1e-12 if tol is None else float(tol)
        value = ellipk_quadrature(float(x), qtol)
        return KEvaluation(ctx.num(value), "quadrature", qtol)
    raise ValueError(f"unknown method {method!r}")


def ellipk(r: Any, ctx: PrecisionContext = DEFAULT_CONTEXT) -> Any:
    """K(r): series for r <= 0.9, AGM above."""
    return ellipk_eval(r, "auto", ctx).value


__all__ = [
    "HARDWARE_CONTEXT",
    "KEvaluation",
    "Modulus",
    "SeriesResult",
    "as_number",
    "ellipk",
    "ellipk_agm",
    "ellipk_eval",
    "ellipk_quadrature",
    "ellipk_series",
    "ellipk_series_detail",
    "gamma_half_ratio",
    "gamma_half_ratios",
    "log_one_minus_r_squared",
    "pochhammer",
]
