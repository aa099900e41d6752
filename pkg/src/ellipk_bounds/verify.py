"""Batch verification jobs.

Every job returns a :class:`VerificationReport`; a failing claim is a report
outcome, never an exception. A positivity claim passes only when its margin
exceeds the rounding-error bound of the evaluation that produced it.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

from . import bounds
from .bounds import BoundFamily, constants
from .coefficients import (
    CoefficientTerm,
    coefficient,
    coefficient_terms,
    kershaw,
    p_n,
    p_n_reduced,
    q_n,
    quadratic,
)
from .oracle import build_f_series, build_g_series, finite_difference
from .precision import DEFAULT_CONTEXT, PrecisionContext
from .special_fn import ellipk_agm, gamma_half_ratios, log_one_minus_r_squared

__all__ = [
    "CoefficientTerm",
    "VerificationReport",
    "coefficient",
    "coefficient_oracle",
    "constants_report",
    "kershaw",
    "p_n",
    "q_n",
    "verify_coefficients",
    "verify_kershaw",
    "verify_lemma",
    "verify_sandwich",
    "verify_shape",
]

ORACLE_MAX_N = 64
ESCALATION_DIGITS = 50

# Printed six-digit prefixes (alpha*, beta* are printed with fewer digits).
PRINTED_CONSTANTS = {
    "theta": ("0.126845", 6),
    "lambda": ("0.213705", 6),
    "alpha": ("0.544425", 6),
    "beta": ("1.364397", 6),
    "delta": ("1.389763", 6),
    "zeta": ("-0.569791", 6),
    "alpha_star": ("0.000893", 6),
    "beta_star": ("0.0459", 4),
}


@dataclass
class VerificationReport:
    claim_id: str
    range: str
    min_margin: float
    passed: bool
    digits_used: int
    first_failure: str | None = None
    details: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        # Serialized schema: field set and order are fixed.
        return {
            "claim_id": self.claim_id,
            "range": self.range,
            "min_margin": self.min_margin,
            "passed": self.passed,
            "digits_used": self.digits_used,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


class _MarginTracker:
    """Running minimum of (margin - error bound) with the first failing location."""

    def __init__(self) -> None:
        self.min_margin: Any = None
        self.first_failure: str | None = None

    def add(self, margin: Any, error: Any, where: str) -> bool:
        ok = margin > error
        if self.min_margin is None or margin < self.min_margin:
            self.min_margin = margin
        if not ok and self.first_failure is None:
            self.first_failure = where
        return ok

    def report(self, claim_id: str, rng: str, ctx: PrecisionContext, **details: Any) -> VerificationReport:
        margin = float(self.min_margin) if self.min_margin is not None else float("inf")
        passed = self.first_failure is None and margin > 0
        return VerificationReport(claim_id, rng, margin, passed, ctx.digits, self.first_failure, details)


def constants_report(ctx: PrecisionContext = DEFAULT_CONTEXT) -> VerificationReport:
    """Compare the evaluated constants with their printed decimal prefixes."""
    values = constants(ctx).as_dict()
    tracker = _MarginTracker()
    details = {}
    for name, (printed, places) in PRINTED_CONSTANTS.items():
        value = values[name]
        # Truncation toward zero to the printed number of places must reproduce the text.
        scaled = int(abs(value) * 10**places)
        text = ("-" if value < 0 else "") + f"{scaled // 10**places}.{scaled % 10**places:0{places}d}"
        error = abs(value - ctx.num(printed))
        margin = ctx.num(10) ** (-places) - error
        if text != printed:
            margin = -error
        tracker.add(margin, 0, name)
        details[name] = {"value": float(value), "printed": printed, "truncated": text}
    identity = abs((values["beta"] - values["alpha"]) - (values["delta"] + values["zeta"]))
    tol = ctx.num(10) ** (-ctx.digits + 5)
    tracker.add(tol - identity, 0, "beta-alpha == delta+zeta")
    details["identity_gap"] = float(identity)
    return tracker.report("constants", "theta..zeta, alpha_star, beta_star", ctx, **details)


def verify_lemma(n_max: int = 10_000, ctx: PrecisionContext = DEFAULT_CONTEXT) -> VerificationReport:
    """Q_n > P_n > 0 and 5 pi n^2 - 16 n + 4 > 0 for n = 1..n_max.

    min_margin is the smallest of P_n and Q_n; the slack Q_n - P_n (which
    shrinks like 1/n^3) is tracked separately against its own error bound.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    positivity = _MarginTracker()
    ordering = _MarginTracker()
    poly_sign = _MarginTracker()
    eps = ctx.eps
    reduced_ok = True
    for term in coefficient_terms(n_max, ctx):
        n = term.n
        p_err = 16 * eps * abs(term.p_n + 4 / ctx.num(4 * n - 3))
        positivity.add(term.p_n, p_err, f"P_{n}")
        positivity.add(term.q_n, term.q_error, f"Q_{n}")
        ordering.add(term.q_n - term.p_n, term.q_error + p_err, f"Q_{n} - P_{n}")
        poly = quadratic(n, ctx)
        poly_sign.add(poly / (5 * ctx.m.pi * n * n), 16 * eps, f"quadratic at n={n}")
        reduced_ok = reduced_ok and p_n_reduced(n, ctx) > 0
    report = positivity.report(
        "lemma",
        f"n=1..{n_max}",
        ctx,
        min_q_minus_p=float(ordering.min_margin),
        ordering_failure=ordering.first_failure,
        reduced_form_positive=reduced_ok,
    )
    for extra in (ordering, poly_sign):
        if extra.first_failure is not None and report.first_failure is None:
            report.first_failure = extra.first_failure
    report.passed = (
        report.passed
        and ordering.first_failure is None
        and poly_sign.first_failure is None
        and reduced_ok
    )
    return report


def verify_gamma_bound(n_max: int = 10_000, ctx: PrecisionContext = DEFAULT_CONTEXT) -> VerificationReport:
    """[Gamma(n - 1/2)/Gamma(n)]^2 < 4 / (4n - 3) for n = 1..n_max."""
    tracker = _MarginTracker()
    eps = ctx.eps
    for n, ratio in enumerate(gamma_half_ratios(n_max, ctx), start=1):
        sq = ratio * ratio
        tracker.add(ctx.num(4) / (4 * n - 3) - sq, (3 * n + 16) * eps * sq, f"n={n}")
    return tracker.report("gamma_ratio_bound", f"n=1..{n_max}", ctx)


def verify_kershaw(
    xs: Iterable[Any] = (0.5, 1, 2, 5, 10),
    ss: Iterable[Any] = (0.1, 0.25, 0.5, 0.75, 0.9),
    ctx: PrecisionContext = DEFAULT_CONTEXT,
) -> VerificationReport:
    """Kershaw's two-sided bound checked against a direct Gamma evaluation."""
    tracker = _MarginTracker()
    m = ctx.m
    xs, ss = list(xs), list(ss)
    for x in xs:
        for s in ss:
            lower, upper = kershaw(x, s, ctx)
            xv, sv = ctx.num(x), ctx.num(s)
            ratio = m.exp(m.loggamma(xv + 1) - m.loggamma(xv + sv))
            err = 64 * ctx.eps * ratio
            tracker.add(ratio - lower, err, f"lower at x={x}, s={s}")
            tracker.add(upper - ratio, err, f"upper at x={x}, s={s}")
    return tracker.report("kershaw", f"x in {xs} x s in {ss}", ctx)


def coefficient_oracle(n: int, ctx: PrecisionContext = DEFAULT_CONTEXT) -> Any:
    """Coefficient of r^(2n-4) in f1 obtained from the Cauchy-product expansion of f."""
    if n < 3:
        raise ValueError("n must be at least 3")
    return build_f_series(n, ctx).series[n]


def verify_coefficients(n_max: int = 10_000, ctx: PrecisionContext = DEFAULT_CONTEXT) -> VerificationReport:
    """c_n > 0 for n = 3..n_max, zeta < 0, and closed form == Cauchy-product oracle for n <= 64."""
    if n_max < 3:
        raise ValueError("n_max must be at least 3")
    tracker = _MarginTracker()
    for term in coefficient_terms(n_max, ctx, n_min=3):
        n = term.n
        err = quadratic(n, ctx) * term.q_error / (2 * n * n)
        tracker.add(term.c_n, err, f"c_{n}")
    c = constants(ctx)
    tracker.add(-c.zeta, 16 * ctx.eps, "zeta < 0")

    top = min(n_max, ORACLE_MAX_N)
    f_table = build_f_series(top, ctx)
    g_table = build_g_series(top, ctx)
    closed = [t.c_n for t in coefficient_terms(top, ctx, n_min=3)]
    tol = ctx.num(10) ** (-ctx.digits + 8)
    worst = ctx.num(0)
    worst_g = ctx.num(0)
    for n, cn in enumerate(closed, start=3):
        worst = max(worst, abs(f_table.series[n] - cn) / abs(cn))
        # g has r^(2n) coefficient -c_n from n = 3 on.
        worst_g = max(worst_g, abs(g_table.series[n] + cn) / abs(cn))
    tracker.add(tol - worst, 0, "closed form vs f-series oracle")
    tracker.add(tol - worst_g, 0, "closed form vs g-series oracle")
    return tracker.report(
        "coefficients",
        f"n=3..{n_max}; oracle n=3..{top}",
        ctx,
        oracle_max_rel_dev=float(worst),
        oracle_g_max_rel_dev=float(worst_g),
        zeta=float(c.zeta),
    )


def verify_partial_sums(n_max: int = 10_000, ctx: PrecisionContext = DEFAULT_CONTEXT) -> VerificationReport:
    """sum_{n=3}^{N} c_n -> beta - alpha (= delta + zeta) with a C/N gap."""
    c = constants(ctx)
    target = c.beta - c.alpha
    partial = ctx.num(0)
    scaled_gaps = []
    checkpoints = {n_max // 10, n_max // 4, n_max // 2, n_max}
    for term in coefficient_terms(n_max, ctx, n_min=3):
        partial += term.c_n
        if term.n in checkpoints:
            scaled_gaps.append((term.n, float((target - partial) * term.n)))
    gap = target - partial
    g1_at_one = c.delta + c.zeta - partial
    # N * gap settles towards a constant from below; take the largest with 10% slack.
    big_c = max(s for _, s in scaled_gaps) * 1.1
    tracker = _MarginTracker()
    tracker.add(gap, 0, "partial sums stay below beta - alpha")
    tracker.add(big_c / n_max - gap, 0, f"gap <= C/N at N={n_max}")
    return tracker.report(
        "partial_sums",
        f"n=3..{n_max}",
        ctx,
        gap=float(gap),
        g1_partial_at_one=float(g1_at_one),
        scaled_gaps=scaled_gaps,
        envelope_c=big_c,
    )


# --- sandwich ---------------------------------------------------------------

_CHECKS: tuple[tuple[str, BoundFamily, int], ...] = (
    # (label, family, sign): margin = sign * (bound - K)
    ("new_lower", BoundFamily.NEW_LOWER, -1),
    ("new_upper", BoundFamily.NEW_UPPER, +1),
    ("avv_upper", BoundFamily.AVV_UPPER, +1),
    ("wclc_lower", BoundFamily.WCLC_LOWER, -1),
    ("wclc_upper", BoundFamily.WCLC_UPPER, +1),
    ("ar_upper", BoundFamily.AR_UPPER, +1),
)


def row_margins(r: Any, ctx: PrecisionContext) -> tuple[Any, dict[BoundFamily, Any], dict[str, Any], Any]:
    """K(r), all bound values, the signed margins and an absolute rounding bound."""
    c = constants(ctx)
    k = ellipk_agm(r, ctx)
    values = bounds.all_bounds(r, c)
    margins = {label: sign * (values[fam] - k) for label, fam, sign in _CHECKS}
    margins["dominance"] = values[BoundFamily.AR_UPPER] - values[BoundFamily.NEW_UPPER]
    # Every expression is O(10) ops on quantities no larger than K + |log(1 - r^2)|.
    x = ctx.num(r)
    error = 256 * ctx.eps * (abs(k) + abs(log_one_minus_r_squared(x, ctx)) + 1)
    return k, values, margins, error


def verify_sandwich(
    grid: Sequence[Any],
    ctx: PrecisionContext = DEFAULT_CONTEXT,
    spot_checks: int = 0,
    seed: int = 0,
) -> VerificationReport:
    """Every bound family against K_agm on ``grid``.

    In hardware mode a point whose margin is inside the rounding bound is
    re-evaluated at 50 digits rather than counted as pass or fail.
    ``spot_checks`` random grid points are additionally re-run at 50 digits.
    """
    trackers = {name: _MarginTracker() for name in [lab for lab, _, _ in _CHECKS] + ["dominance"]}
    escalated = 0
    fine = PrecisionContext.extended(ESCALATION_DIGITS)
    for r in grid:
        _, _, margins, error = row_margins(r, ctx)
        unresolved = [name for name, mg in margins.items() if abs(mg) <= error]
        if unresolved and ctx.is_hardware:
            escalated += 1
            fine_r = fine.num(str(r))
            _, _, fine_margins, fine_error = row_margins(fine_r, fine)
            for name in unresolved:
                margins[name] = fine_margins[name]
                trackers[name].add(fine_margins[name], fine_error, f"r={r}")
            for name, mg in margins.items():
                if name not in unresolved:
                    trackers[name].add(mg, error, f"r={r}")
            continue
        for name, mg in margins.items():
            trackers[name].add(mg, error, f"r={r}")

    spot_failures = 0
    if spot_checks:
        rng = random.Random(seed)
        for r in rng.sample(list(grid), min(spot_checks, len(grid))):
            _, _, fine_margins, fine_error = row_margins(fine.num(str(r)), fine)
            spot_failures += sum(1 for mg in fine_margins.values() if not mg > fine_error)

    per_family = {name: float(t.min_margin) for name, t in trackers.items()}
    failures = {name: t.first_failure for name, t in trackers.items() if t.first_failure}
    overall = _MarginTracker()
    for name, t in trackers.items():
        where = f"{name} at {t.first_failure}" if t.first_failure else name
        overall.add(t.min_margin, 0, where)
        if t.first_failure and overall.first_failure is None:
            overall.first_failure = where
    report = overall.report(
        "sandwich",
        _describe_grid(grid),
        ctx,
        per_family=per_family,
        failures=failures,
        escalated=escalated,
        spot_checks=spot_checks,
        spot_failures=spot_failures,
    )
    report.passed = report.passed and spot_failures == 0
    return report


def _describe_grid(grid: Sequence[Any]) -> str:
    if not grid:
        return "empty grid"
    return f"{len(grid)} points in [{grid[0]}, {grid[-1]}]"


# --- shape ------------------------------------------------------------------


def divided_differences(xs: Sequence[Any], ys: Sequence[Any]) -> tuple[list[Any], list[Any]]:
    """First divided differences on consecutive pairs; second on centred triples."""
    first = [(ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]) for i in range(len(xs) - 1)]
    second = [
        2 * (first[i] - first[i - 1]) / (xs[i + 1] - xs[i - 1]) for i in range(1, len(xs) - 1)
    ]
    return first, second


def verify_shape(
    grid: Sequence[Any],
    ctx: PrecisionContext = DEFAULT_CONTEXT,
    derivative_at: Any = 0.5,
    step: Any = 1e-4,
    n_max: int = 400,
) -> VerificationReport:
    """f1 increasing and convex inside (alpha, beta); g1 decreasing and concave inside (0, delta)."""
    if len(grid) < 3:
        raise ValueError("shape checks need at least 3 grid points")
    xs = [ctx.num(str(r)) for r in grid]
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValueError("grid must be strictly increasing")
    c = constants(ctx)
    f_vals = [bounds.f1_direct(x, ctx) for x in xs]
    g_vals = [bounds.g1_direct(x, ctx) for x in xs]
    tracker = _MarginTracker()
    f1st, f2nd = divided_differences(xs, f_vals)
    g1st, g2nd = divided_differences(xs, g_vals)
    for i, d in enumerate(f1st):
        tracker.add(d, 0, f"f1 first difference at [{grid[i]}, {grid[i + 1]}]")
    for i, d in enumerate(f2nd, start=1):
        tracker.add(d, 0, f"f1 second difference at {grid[i]}")
    for i, d in enumerate(g1st):
        tracker.add(-d, 0, f"g1 first difference at [{grid[i]}, {grid[i + 1]}]")
    for i, d in enumerate(g2nd, start=1):
        tracker.add(-d, 0, f"g1 second difference at {grid[i]}")
    for r, fv, gv in zip(grid, f_vals, g_vals):
        tracker.add(fv - c.alpha, 0, f"f1({r}) > alpha")
        tracker.add(c.beta - fv, 0, f"f1({r}) < beta")
        tracker.add(gv, 0, f"g1({r}) > 0")
        tracker.add(c.delta - gv, 0, f"g1({r}) < delta")

    fd = finite_difference(lambda x: bounds.f1_direct(x, ctx), derivative_at, step, 1, ctx)
    exact = bounds.f1_series_derivative(derivative_at, n_max, c)
    rel_dev = abs(fd - exact) / abs(exact)
    tracker.add(ctx.num("1e-6") - rel_dev, 0, "finite-difference f1' vs series derivative")
    return tracker.report(
        "shape",
        _describe_grid(grid),
        ctx,
        derivative_rel_dev=float(rel_dev),
        f1_derivative_fd=float(fd),
        f1_derivative_series=float(exact),
    )


def default_grid(start: str, stop: str, step: str) -> list[str]:
    """Decimal grid start, start+step, ..., stop (both ends inclusive) as exact strings."""
    from decimal import Decimal

    a, b, h = Decimal(start), Decimal(stop), Decimal(step)
    out = []
    x = a
    while x <= b:
        out.append(str(x))
        x += h
    return out


def run_all(
    ctx: PrecisionContext = DEFAULT_CONTEXT,
    n_max: int = 10_000,
    sandwich_grid: Sequence[Any] | None = None,
    shape_grid: Sequence[Any] | None = None,
    progress: Callable[[str], None] | None = None,
) -> list[VerificationReport]:
    jobs: list[tuple[str, Callable[[], VerificationReport]]] = [
        ("constants", lambda: constants_report(ctx)),
        ("lemma", lambda: verify_lemma(n_max, ctx)),
        ("coefficients", lambda: verify_coefficients(n_max, ctx)),
        ("sandwich", lambda: verify_sandwich(
            sandwich_grid or default_grid("0.0001", "0.9999", "0.0001"), ctx)),
        ("shape", lambda: verify_shape(shape_grid or default_grid("0.05", "0.95", "0.05"), ctx)),
    ]
    reports = []
    for name, job in jobs:
        if progress:
            progress(name)
        reports.append(job())
    return reports
