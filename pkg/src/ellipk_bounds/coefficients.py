"""The Q_n / P_n sequences, Kershaw's Gamma-ratio bounds and the Maclaurin coefficients c_n.

c_n = (5 pi n^2 - 16 n + 4) Q_n / (2 n^2) is the r^(2n) coefficient of f
(equivalently the r^(2n-4) coefficient of f1) and, with the opposite sign,
the r^(2n-2) coefficient of g1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterator

from .precision import DEFAULT_CONTEXT, DomainError, PrecisionContext
from .special_fn import gamma_half_ratios


@dataclass(frozen=True)
class CoefficientTerm:
    n: int
    q_n: Any
    p_n: Any
    c_n: Any | None
    # Absolute rounding-error bound for q_n (and hence q_n - p_n).
    q_error: Any = 0


def quadratic(n: int, ctx: PrecisionContext = DEFAULT_CONTEXT) -> Any:
    """5 pi n^2 - 16 n + 4."""
    return 5 * ctx.m.pi * n * n - 16 * n + 4


def _rational_term(n: int, ctx: PrecisionContext) -> Any:
    return 5 * ctx.m.pi * n / quadratic(n, ctx)


def p_n(n: int, ctx: PrecisionContext = DEFAULT_CONTEXT) -> Any:
    """P_n = 5 pi n / (5 pi n^2 - 16 n + 4) - 4 / (4n - 3)."""
    if n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    return _rational_term(n, ctx) - ctx.num(4) / (4 * n - 3)


def p_n_reduced(n: int, ctx: PrecisionContext = DEFAULT_CONTEXT) -> Any:
    """(64 - 15 pi) n - 16, positive exactly when P_n is (for n >= 1)."""
    return (64 - 15 * ctx.m.pi) * n - 16


def _q_from_ratio(n: int, ratio: Any, ctx: PrecisionContext) -> Any:
    return _rational_term(n, ctx) - ratio * ratio


def q_n(n: int, ctx: PrecisionContext = DEFAULT_CONTEXT) -> Any:
    """Q_n = 5 pi n / (5 pi n^2 - 16 n + 4) - [Gamma(n - 1/2) / Gamma(n)]^2."""
    if n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    for ratio in gamma_half_ratios(n, ctx):
        pass
    return _q_from_ratio(n, ratio, ctx)


def c_from_q(n: int, q: Any, ctx: PrecisionContext) -> Any:
    return quadratic(n, ctx) * q / (2 * n * n)


def coefficient_terms(
    n_max: int, ctx: PrecisionContext = DEFAULT_CONTEXT, n_min: int = 1
) -> Iterator[CoefficientTerm]:
    """Yield CoefficientTerm records for n = n_min .. n_max in one O(n_max) pass.

    ``q_error`` bounds the rounding error of q_n: the Gamma ratio picks up one
    few relative roundings per recurrence step and the two terms of Q_n are each
    ~1/n, so |err| <= (3n + 16) eps (|rational| + ratio^2).
    """
    eps = ctx.eps
    for n, ratio in enumerate(gamma_half_ratios(n_max, ctx), start=1):
        if n < n_min:
            continue
        rational = _rational_term(n, ctx)
        sq = ratio * ratio
        q = rational - sq
        p = rational - ctx.num(4) / (4 * n - 3)
        c = c_from_q(n, q, ctx) if n >= 3 else None
        yield CoefficientTerm(n, q, p, c, (3 * n + 16) * eps * (abs(rational) + sq))


def coefficient(n: int, ctx: PrecisionContext = DEFAULT_CONTEXT) -> CoefficientTerm:
    """Closed-form record (n, Q_n, P_n, c_n) for n >= 3."""
    if n < 3:
        raise DomainError(f"c_n is defined for n >= 3, got {n!r}")
    *_, term = coefficient_terms(n, ctx, n_min=n)
    return term


def c_values(n_max: int, ctx: PrecisionContext = DEFAULT_CONTEXT) -> list[Any]:
    """[c_3, c_4, ..., c_{n_max}]."""
    return [t.c_n for t in coefficient_terms(n_max, ctx, n_min=3)]


def kershaw(x: Any, s: Any, ctx: PrecisionContext = DEFAULT_CONTEXT) -> tuple[Any, Any]:
    """Kershaw's bounds on Gamma(x+1)/Gamma(x+s) for x > 0, 0 < s < 1.

    Returns ((x + s/2)^(1-s), (x - 1/2 + sqrt(1/4 + s))^(1-s)).
    """
    x = ctx.num(x)
    s = ctx.num(s)
    if not x > 0 or not 0 < s < 1:
        raise DomainError(f"Kershaw's inequality needs x > 0 and 0 < s < 1, got x={x}, s={s}")
    m = ctx.m
    lower = (x + s / 2) ** (1 - s)
    upper = (x - ctx.num(1) / 2 + m.sqrt(ctx.num(1) / 4 + s)) ** (1 - s)
    return lower, upper
