"""Command-line front end.

    ellipk-bounds eval --r 0.5 --method auto
    ellipk-bounds bounds --r 0.5
    ellipk-bounds compare --grid 0.01:0.99:0.01 --format csv --out table.csv
    ellipk-bounds verify all

Exit codes: 0 all claims hold, 1 a claim failed or a bound was violated,
2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Any, Sequence

from . import verify as jobs
from .bounds import LOWER_FAMILIES, UPPER_FAMILIES, BoundFamily, constants, new_lower_branches, new_upper_branches
from .oracle import build_f_series, build_g_series
from .precision import EXTENDED, HARDWARE, EllipkError, PrecisionContext
from .special_fn import ellipk_eval

EXIT_OK, EXIT_CLAIM, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

CSV_HEADER = (
    "r",
    "k",
    "new_lower",
    "new_upper",
    "ar_upper",
    "avv_upper",
    "wclc_lower",
    "wclc_upper",
    "tightest_lower",
    "tightest_upper",
)

_COLUMN_FAMILY = {
    "new_lower": BoundFamily.NEW_LOWER,
    "new_upper": BoundFamily.NEW_UPPER,
    "ar_upper": BoundFamily.AR_UPPER,
    "avv_upper": BoundFamily.AVV_UPPER,
    "wclc_lower": BoundFamily.WCLC_LOWER,
    "wclc_upper": BoundFamily.WCLC_UPPER,
}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class GridSpec:
    start: Decimal
    stop: Decimal
    step: Decimal

    @classmethod
    def parse(cls, text: str) -> GridSpec:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"grid must look like start:stop:step, got {text!r}")
        try:
            start, stop, step = (Decimal(p) for p in parts)
        except InvalidOperation:
            raise UsageError(f"grid entries must be decimal numbers, got {text!r}") from None
        if not (0 < start < stop < 1) or step <= 0:
            raise UsageError("grid needs 0 < start < stop < 1 and step > 0")
        return cls(start, stop, step)

    def points(self) -> list[str]:
        """start, start + step, ... up to and including stop when it lands on the lattice."""
        out = []
        x = self.start
        while x <= self.stop:
            out.append(str(x))
            x += self.step
        return out

    def __str__(self) -> str:
        return f"{self.start}:{self.stop}:{self.step}"


@dataclass(frozen=True)
class RunConfig:
    digits: int = 50
    mode: str = EXTENDED
    grid: GridSpec | None = None
    n_max: int = 10_000
    fmt: str = "table"
    out: Path | None = None

    def context(self) -> PrecisionContext:
        if self.mode == HARDWARE:
            return PrecisionContext.hardware()
        return PrecisionContext.extended(self.digits)


@dataclass
class ComparisonRow:
    r: str
    k_value: Any
    values: dict[BoundFamily, Any]
    tightest_lower: BoundFamily
    tightest_upper: BoundFamily
    violations: list[str]

    def csv_fields(self, ctx: PrecisionContext) -> list[str]:
        out = [self.r, ctx.format(self.k_value)]
        out += [ctx.format(self.values[_COLUMN_FAMILY[col]]) for col in CSV_HEADER[2:8]]
        out += [self.tightest_lower.value, self.tightest_upper.value]
        return out

    def as_dict(self, ctx: PrecisionContext) -> dict[str, str]:
        return dict(zip(CSV_HEADER, self.csv_fields(ctx)))


def tightest(values: dict[BoundFamily, Any]) -> tuple[BoundFamily, BoundFamily]:
    """Largest lower bound and smallest upper bound; ties go to the earlier family."""
    lower = max(LOWER_FAMILIES, key=lambda f: (values[f], -LOWER_FAMILIES.index(f)))
    upper = min(UPPER_FAMILIES, key=lambda f: (values[f], UPPER_FAMILIES.index(f)))
    return lower, upper


def comparison_row(r: str, ctx: PrecisionContext) -> ComparisonRow:
    k, values, margins, error = jobs.row_margins(ctx.num(r), ctx)
    suspicious = [name for name, mg in margins.items() if not mg > error]
    if suspicious and ctx.is_hardware:
        # Rounding can hide margins that vanish as r -> 0; settle them at 50 digits.
        fine = PrecisionContext.extended(jobs.ESCALATION_DIGITS)
        _, _, fine_margins, fine_error = jobs.row_margins(fine.num(r), fine)
        suspicious = [name for name in suspicious if not fine_margins[name] > fine_error]
    lower, upper = tightest(values)
    return ComparisonRow(r, k, values, lower, upper, suspicious)


def _runs(grid: Sequence[str], flags: Sequence[bool]) -> list[list[str]]:
    runs: list[list[str]] = []
    start = None
    for i, flag in enumerate(flags):
        if flag and start is None:
            start = i
        if start is not None and (not flag or i == len(flags) - 1):
            end = i if flag else i - 1
            runs.append([grid[start], grid[end]])
            start = None
    return runs


def comparison_summary(rows: Sequence[ComparisonRow]) -> dict[str, Any]:
    """Sub-ranges where each family of a pair gives the tighter bound, plus witnesses."""
    grid = [row.r for row in rows]
    pairs: dict[str, Any] = {}
    for group, better in ((UPPER_FAMILIES, lambda a, b: a < b), (LOWER_FAMILIES, lambda a, b: a > b)):
        for i, fa in enumerate(group):
            for fb in group[i + 1 :]:
                a_wins = [better(row.values[fa], row.values[fb]) for row in rows]
                b_wins = [better(row.values[fb], row.values[fa]) for row in rows]
                pairs[f"{fa.value} vs {fb.value}"] = {
                    f"{fa.value} tighter": _runs(grid, a_wins),
                    f"{fb.value} tighter": _runs(grid, b_wins),
                }

    def witness(pred) -> str | None:
        # Widest gap is the most convincing witness.
        best = None
        for row in rows:
            gap = pred(row)
            if gap > 0 and (best is None or gap > best[0]):
                best = (gap, row.r)
        return best[1] if best else None

    nu, wu = BoundFamily.NEW_UPPER, BoundFamily.WCLC_UPPER
    return {
        "rows": len(rows),
        "violations": sum(len(row.violations) for row in rows),
        "violation_points": [row.r for row in rows if row.violations],
        "new_upper_below_ar_upper_everywhere": all(
            row.values[nu] < row.values[BoundFamily.AR_UPPER] for row in rows
        ),
        "witness_wclc_upper_tighter": witness(lambda row: row.values[nu] - row.values[wu]),
        "witness_new_upper_tighter": witness(lambda row: row.values[wu] - row.values[nu]),
        "tighter_ranges": pairs,
    }


# --- output helpers ---------------------------------------------------------


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.out is None:
        sys.stdout.write(text)
        return
    cfg.out.parent.mkdir(parents=True, exist_ok=True)
    with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _table_text(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    cells = [list(map(str, header))] + [[str(v) for v in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    lines = ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines) + "\n"


# --- commands ---------------------------------------------------------------


def cmd_eval(args: argparse.Namespace, cfg: RunConfig) -> int:
    ctx = cfg.context()
    res = ellipk_eval(args.r, args.method, ctx)
    record = {
        "r": args.r,
        "k": ctx.format(res.value),
        "method": res.method,
        "error_estimate": f"{float(res.error_estimate):.3e}",
    }
    if cfg.fmt == "json":
        _emit(json.dumps(record, indent=2) + "\n", cfg)
    elif cfg.fmt == "csv":
        _emit(_csv_text(list(record), [list(record.values())]), cfg)
    else:
        _emit(
            f"K({args.r}) = {record['k']}\nmethod: {res.method}\n"
            f"error estimate: {record['error_estimate']}\n",
            cfg,
        )
    return EXIT_OK


def cmd_bounds(args: argparse.Namespace, cfg: RunConfig) -> int:
    ctx = cfg.context()
    row = comparison_row(args.r, ctx)
    c = constants(ctx)
    upper_b = new_upper_branches(ctx.num(args.r), c)
    lower_b = new_lower_branches(ctx.num(args.r), c)
    branches = {
        "new_upper_u1": ctx.format(upper_b.first),
        "new_upper_u2": ctx.format(upper_b.second),
        "new_lower_l1": ctx.format(lower_b.first),
        "new_lower_l2": ctx.format(lower_b.second),
    }
    if cfg.fmt == "csv":
        _emit(_csv_text(CSV_HEADER, [row.csv_fields(ctx)]), cfg)
    elif cfg.fmt == "json":
        record = row.as_dict(ctx) | {"branches": branches, "violations": row.violations}
        _emit(json.dumps(record, indent=2) + "\n", cfg)
    else:
        items = list(row.as_dict(ctx).items()) + list(branches.items())
        items.append(("violations", ", ".join(row.violations) or "none"))
        _emit(_table_text(("quantity", "value"), items), cfg)
    return EXIT_CLAIM if row.violations else EXIT_OK


def cmd_compare(args: argparse.Namespace, cfg: RunConfig) -> int:
    ctx = cfg.context()
    grid = (cfg.grid or GridSpec.parse("0.01:0.99:0.01")).points()
    rows = [comparison_row(r, ctx) for r in grid]
    summary = comparison_summary(rows)
    summary["grid"] = str(cfg.grid or "0.01:0.99:0.01")
    if cfg.fmt == "json":
        payload = {"rows": [row.as_dict(ctx) for row in rows], "summary": summary}
        _emit(json.dumps(payload, indent=2) + "\n", cfg)
    elif cfg.fmt == "csv":
        _emit(_csv_text(CSV_HEADER, [row.csv_fields(ctx) for row in rows]), cfg)
        summary_text = json.dumps(summary, indent=2) + "\n"
        if cfg.out is not None:
            cfg.out.with_name(cfg.out.name + ".summary.json").write_text(summary_text, encoding="utf-8")
        else:
            sys.stderr.write(summary_text)
    else:
        table = _table_text(CSV_HEADER, [row.csv_fields(ctx) for row in rows])
        lines = [
            f"rows: {summary['rows']}  violations: {summary['violations']}",
            f"new_upper < ar_upper at every r: {summary['new_upper_below_ar_upper_everywhere']}",
            f"WCLC upper tighter than new upper at r = {summary['witness_wclc_upper_tighter']}",
            f"new upper tighter than WCLC upper at r = {summary['witness_new_upper_tighter']}",
        ]
        _emit(table + "\n" + "\n".join(lines) + "\n", cfg)
    return EXIT_CLAIM if summary["violations"] else EXIT_OK


VERIFY_TARGETS = ("lemma", "coefficients", "sandwich", "shape", "constants", "all")


def cmd_verify(args: argparse.Namespace, cfg: RunConfig) -> int:
    ctx = cfg.context()
    sandwich_grid = (cfg.grid or GridSpec.parse("0.0001:0.9999:0.0001")).points()
    shape_grid = (cfg.grid or GridSpec.parse("0.05:0.95:0.05")).points()
    spot = args.spot_checks if args.spot_checks is not None else (100 if ctx.is_hardware else 0)
    runners = {
        "constants": lambda: jobs.constants_report(ctx),
        "lemma": lambda: jobs.verify_lemma(cfg.n_max, ctx),
        "coefficients": lambda: jobs.verify_coefficients(cfg.n_max, ctx),
        "sandwich": lambda: jobs.verify_sandwich(sandwich_grid, ctx, spot_checks=spot),
        "shape": lambda: jobs.verify_shape(shape_grid, ctx),
    }
    targets = list(runners) if args.target == "all" else [args.target]
    reports = []
    for name in targets:
        t0 = time.perf_counter()
        report = runners[name]()
        report.details["seconds"] = round(time.perf_counter() - t0, 3)
        reports.append(report)
    if cfg.fmt == "json":
        payload: Any = [r.to_dict() for r in reports]
        if len(reports) == 1:
            payload = payload[0]
        _emit(json.dumps(payload, indent=2) + "\n", cfg)
    elif cfg.fmt == "csv":
        header = list(reports[0].to_dict())
        _emit(_csv_text(header, [list(r.to_dict().values()) for r in reports]), cfg)
    else:
        rows = [
            (
                "PASS" if r.passed else "FAIL",
                r.claim_id,
                f"{r.min_margin:.6e}",
                r.range,
                r.first_failure or "-",
                f"{r.details['seconds']:.2f}s",
            )
            for r in reports
        ]
        _emit(_table_text(("result", "claim", "min_margin", "range", "first_failure", "time"), rows), cfg)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_CLAIM


def cmd_series(args: argparse.Namespace, cfg: RunConfig) -> int:
    ctx = cfg.context()
    table = build_f_series(args.order, ctx) if args.name in ("f", "f1") else build_g_series(args.order, ctx)
    if args.name in ("f1", "g1"):
        table = table.reduced()
    _emit(table.to_csv(), cfg)
    return EXIT_OK


# --- parser -----------------------------------------------------------------


def _modulus(text: str) -> str:
    try:
        Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a real number: {text!r}") from None
    return text


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--digits", type=int, default=50, help="significant digits in extended mode")
    common.add_argument("--mode", choices=(HARDWARE, EXTENDED), default=EXTENDED)
    common.add_argument("--format", dest="fmt", choices=("table", "csv", "json"), default="table")
    common.add_argument("--out", type=Path, default=None, help="write output here instead of stdout")

    parser = argparse.ArgumentParser(
        prog="ellipk-bounds",
        description="Evaluate K(r), its closed-form bounds, and verify the bound machinery.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate K(r)")
    p.add_argument("--r", type=_modulus, required=True)
    p.add_argument("--method", choices=("agm", "series", "quadrature", "auto"), default="auto")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bounds", parents=[common], help="all bound families at one r")
    p.add_argument("--r", type=_modulus, required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("compare", parents=[common], help="bound comparison table over a grid")
    p.add_argument("--grid", default=None, help="start:stop:step (default 0.01:0.99:0.01)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("verify", parents=[common], help="run verification jobs")
    p.add_argument("target", choices=VERIFY_TARGETS)
    p.add_argument("--max-n", dest="n_max", type=int, default=10_000)
    p.add_argument("--grid", default=None, help="r grid for sandwich/shape jobs")
    p.add_argument("--spot-checks", type=int, default=None,
                   help="50-digit re-checks of random sandwich points (default 100 in hardware mode)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("series", parents=[common], help="export Maclaurin coefficients as CSV")
    p.add_argument("--name", choices=("f", "g", "f1", "g1"), default="f1")
    p.add_argument("--order", type=int, default=64)
    p.set_defaults(func=cmd_series)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.mode == EXTENDED and args.digits < 16:
            raise UsageError("--digits must be at least 16")
        if args.command == "verify":
            floor = 1 if args.target == "lemma" else 3
            if args.n_max < floor:
                raise UsageError(f"--max-n must be at least {floor}")
        grid = GridSpec.parse(args.grid) if getattr(args, "grid", None) else None
        cfg = RunConfig(args.digits, args.mode, grid, getattr(args, "n_max", 10_000), args.fmt, args.out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args, cfg)
    except EllipkError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
