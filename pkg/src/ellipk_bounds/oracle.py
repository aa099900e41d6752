"""Independent references: truncated power series in r^2 and central differences.

The series here rebuild f and g from the hypergeometric expansion of K and the
logarithm series alone, so their coefficients can be compared with the closed
form c_n without sharing any code path with it.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Any, Callable, Literal, Sequence

from .bounds import constants
from .precision import DEFAULT_CONTEXT, AssemblyMismatch, DomainError, PrecisionContext
from .special_fn import pochhammer


@dataclass(frozen=True)
class PowerSeries:
    """sum_k coefficients[k] r^(2k), truncated after index ``order``."""

    coefficients: tuple[Any, ...]
    ctx: PrecisionContext = DEFAULT_CONTEXT

    def __post_init__(self) -> None:
        if not self.coefficients:
            raise ValueError("a power series needs at least one coefficient")
        object.__setattr__(self, "coefficients", tuple(self.coefficients))

    @classmethod
    def from_list(cls, values: Sequence[Any], ctx: PrecisionContext = DEFAULT_CONTEXT) -> PowerSeries:
        return cls(tuple(ctx.num(v) for v in values), ctx)

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, k: int) -> Any:
        return self.coefficients[k]

    def _aligned(self, other: PowerSeries) -> int:
        return min(self.order, other.order)

    def __add__(self, other: PowerSeries) -> PowerSeries:
        n = self._aligned(other)
        return PowerSeries(tuple(self[k] + other[k] for k in range(n + 1)), self.ctx)

    def __neg__(self) -> PowerSeries:
        return PowerSeries(tuple(-a for a in self.coefficients), self.ctx)

    def __sub__(self, other: PowerSeries) -> PowerSeries:
        return self + (-other)

    def scale(self, factor: Any) -> PowerSeries:
        return PowerSeries(tuple(factor * a for a in self.coefficients), self.ctx)

    def __mul__(self, other: PowerSeries) -> PowerSeries:
        """Cauchy product; coefficient k uses exactly inputs 0..k of each factor."""
        n = self._aligned(other)
        fsum = self.ctx.m.fsum
        out = tuple(fsum(self[i] * other[k - i] for i in range(k + 1)) for k in range(n + 1))
        return PowerSeries(out, self.ctx)

    def truncate(self, order: int) -> PowerSeries:
        return PowerSeries(self.coefficients[: order + 1], self.ctx)

    def evaluate(self, r: Any) -> Any:
        x2 = self.ctx.num(r) ** 2
        total = self.ctx.num(0)
        for a in reversed(self.coefficients):
            total = total * x2 + a
        return total


def polynomial(values: Sequence[Any], order: int, ctx: PrecisionContext) -> PowerSeries:
    padded = [ctx.num(v) for v in values] + [ctx.num(0)] * (order + 1 - len(values))
    return PowerSeries(tuple(padded[: order + 1]), ctx)


def series_K(order: int, ctx: PrecisionContext = DEFAULT_CONTEXT) -> PowerSeries:
    """(pi/2) sum_k [(1/2, k)^2 / (k!)^2] r^(2k)."""
    if order < 0:
        raise DomainError("order must be nonnegative")
    # Pochhammer products overflow doubles past k ~ 170, so hardware mode
    # evaluates them in a 30-digit context and rounds.
    work = PrecisionContext.extended(30) if ctx.is_hardware else ctx
    half = work.num(1) / 2
    half_pi = work.m.pi / 2
    coeffs = []
    for k in range(order + 1):
        ratio = pochhammer(half, k, work) / pochhammer(1, k, work)
        coeffs.append(ctx.num(half_pi * ratio * ratio))
    return PowerSeries(tuple(coeffs), ctx)


def series_log_term(order: int, ctx: PrecisionContext = DEFAULT_CONTEXT) -> PowerSeries:
    """(pi/2)(16 - 5 log(1 - r^2)) = 8 pi + (5 pi / 2) sum_{k>=1} r^(2k) / k."""
    if order < 0:
        raise DomainError("order must be nonnegative")
    pi = ctx.m.pi
    coeffs = [8 * pi] + [5 * pi / 2 / k for k in range(1, order + 1)]
    return PowerSeries(tuple(coeffs), ctx)


@dataclass(frozen=True)
class SeriesTable:
    name: Literal["f", "g", "f1", "g1"]
    series: PowerSeries
    # Power of r^2 divided out: f1 = f / r^4 -> 2, g1 = g / r^2 -> 1.
    shift: int = 0

    def reduced(self) -> SeriesTable:
        """Divide out the shift (f -> f1, g -> g1)."""
        if self.name == "f":
            return SeriesTable("f1", PowerSeries(self.series.coefficients[2:], self.series.ctx), 2)
        if self.name == "g":
            return SeriesTable("g1", PowerSeries(self.series.coefficients[1:], self.series.ctx), 1)
        return self

    def coefficient_of_r2(self, k: int) -> Any:
        """Coefficient of r^(2k) in the table's own variable (after any shift)."""
        return self.series[k]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["index", "coefficient"])
        for k, a in enumerate(self.series.coefficients):
            writer.writerow([k, self.series.ctx.format(a)])
        return buf.getvalue()


def _check_heads(
    series: PowerSeries, vanishing: Sequence[int], ctx: PrecisionContext, label: str
) -> None:
    pi = ctx.m.pi
    tol = 8 * pi * ctx.num(10) ** (-ctx.digits + 10)
    for k in vanishing:
        if abs(series[k]) > tol:
            raise AssemblyMismatch(f"{label}: coefficient of r^{2 * k} is {series[k]}, expected 0")


def _quadratic_factor(order: int, ctx: PrecisionContext) -> PowerSeries:
    return polynomial([16, 5 * ctx.m.pi - 16], order, ctx)


def build_f_series(order: int, ctx: PrecisionContext = DEFAULT_CONTEXT) -> SeriesTable:
    """f = (pi/2)(16 - 5 log(1-r^2)) - (theta r^2 + K)(16 + (5 pi - 16) r^2), to r^(2 order)."""
    if order < 3:
        raise DomainError("order must be at least 3")
    theta = constants(ctx).theta
    k_plus = series_K(order, ctx) + polynomial([0, theta], order, ctx)
    f = series_log_term(order, ctx) - k_plus * _quadratic_factor(order, ctx)
    _check_heads(f, (0, 1), ctx, "f")
    return SeriesTable("f", f, 0)


def build_g_series(order: int, ctx: PrecisionContext = DEFAULT_CONTEXT) -> SeriesTable:
    """g = (lambda r^2 + K)(16 + (5 pi - 16) r^2) - (pi/2)(16 - 5 log(1-r^2)), to r^(2 order)."""
    if order < 3:
        raise DomainError("order must be at least 3")
    lam = constants(ctx).lam
    k_plus = series_K(order, ctx) + polynomial([0, lam], order, ctx)
    g = k_plus * _quadratic_factor(order, ctx) - series_log_term(order, ctx)
    _check_heads(g, (0,), ctx, "g")
    return SeriesTable("g", g, 0)


def finite_difference(
    fn: Callable[[Any], Any],
    r: Any,
    step: Any = None,
    order: int = 1,
    ctx: PrecisionContext | None = None,
) -> Any:
    """Central-difference estimate of the first or second derivative of ``fn`` at r."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if ctx is None:
        ctx = DEFAULT_CONTEXT if not isinstance(r, float) else PrecisionContext.hardware()
    if step is None:
        step = 1e-4 if ctx.is_hardware else ctx.num(10) ** (-(ctx.digits // 3))
    x = ctx.num(r)
    h = ctx.num(step)
    if h <= 0:
        raise DomainError("step must be positive")
    if not (0 < x - h and x + h < 1):
        raise DomainError(f"stencil [{x - h}, {x + h}] leaves (0, 1)")
    if order == 1:
        return (fn(x + h) - fn(x - h)) / (2 * h)
    return (fn(x + h) - 2 * fn(x) + fn(x - h)) / (h * h)
