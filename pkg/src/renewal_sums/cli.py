"""Command-line front end: ``renewal-sums <command> ...``.

Exit status is 0 on success, 2 on usage or domain errors and 1 when a
requested tolerance cannot be reached.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import convergence, renewal, sums, triangles
from ._rational import DomainError, fmt_decimal, fmt_rational, to_rational
from .series import SeriesResult, ToleranceError

SEED_ENV = "RENEWAL_SUMS_SEED"

FAMILY_HELP = """\
families and identities (t, h rational, e.g. 1/4 or 0.25):
  binomial    column K | diagonal N | alternating K        no parameters
  eulerian    column K | diagonal N | alternating K        no parameters (no closed form)
  bernstein   column K | diagonal N | alternating K        0 < t < 1
  hbernstein  column K | alternating K                     0 < h < t < 1
              diagonal N                                   0 < t < 1, h > 0
  bspline     column K | alternating K (argument K + t)    t >= 0
              diagonal N (terms N_{0,N-k}(k + t))          t > 0 (no closed form)
"""


class UsageError(Exception):
    pass


def _rational_arg(text: str) -> Fraction:
    try:
        return to_rational(text)
    except (TypeError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _rational_list(text: str) -> list[Fraction]:
    return [_rational_arg(x) for x in text.split(",") if x.strip()]


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _pos_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _family(args: argparse.Namespace) -> sums.Family:
    return sums.Family(args.family, t=args.t, h=args.h)


def _emit_records(records: list[dict], fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(records if len(records) != 1 else records[0], sort_keys=True) + "\n")
        return
    fields = [f for f in sums.RECORD_FIELDS if any(f in r for r in records)]
    w = csv.writer(out, lineterminator="\n")
    w.writerow(fields)
    for r in records:
        w.writerow([json.dumps(r[f], sort_keys=True) if isinstance(r.get(f), dict) else r.get(f, "") for f in fields])


def _text_result(result: SeriesResult | Fraction, digits: int) -> str:
    if isinstance(result, Fraction):
        return fmt_rational(result)
    bound = fmt_decimal(result.truncation_bound, 3) if result.truncation_bound else "0"
    return f"{fmt_decimal(result.value, digits)} +/- {bound} ({result.terms_used} terms)"


# -- commands -------------------------------------------------------------------------


def cmd_triangle(args, out) -> int:
    tri = triangles.get_triangle(args.kind)
    if args.format == "csv":
        out.write(tri.to_csv(args.levels, normalized=args.normalized))
        return 0
    if args.normalized:
        rows = [[fmt_rational(x) for x in triangles.normalized_row(tri, n)] for n in range(args.levels)]
    else:
        rows = [list(tri.row(n)) for n in range(args.levels)]
    out.write(json.dumps({"kind": args.kind, "levels": args.levels, "normalized": args.normalized, "rows": rows}) + "\n")
    return 0


def cmd_parity(args, out) -> int:
    bitmap = triangles.parity_bitmap(args.kind, args.levels)
    text = bitmap.to_pbm()
    if args.out in (None, "-"):
        out.write(text)
    else:
        Path(args.out).write_text(text, encoding="ascii")
    return 0


def cmd_sum(args, out) -> int:
    f = _family(args)
    if args.identity == "diagonal":
        if args.n is None:
            raise UsageError("--n is required for the diagonal identity")
        result: SeriesResult | Fraction = sums.diagonal_sum(f, args.n)
        params = {"n": args.n}
    else:
        if args.k is None:
            raise UsageError(f"--k is required for the {args.identity} identity")
        op = sums.column_sum if args.identity == "column" else sums.alternating_sum
        result = op(f, args.k, eps=args.eps)
        params = {"k": args.k}
    if args.format == "text":
        out.write(_text_result(result, args.digits) + "\n")
    else:
        _emit_records([sums.result_record(f, args.identity, params, result, args.digits)], args.format, out)
    return 0


def cmd_closed(args, out) -> int:
    f = _family(args)
    result = sums.closed_form(f, args.identity, n=args.n, k=args.k, eps=args.eps)
    params = {key: getattr(args, key) for key in ("n", "k") if getattr(args, key) is not None}
    if args.format == "text":
        out.write(_text_result(result, args.digits) + "\n")
    else:
        _emit_records([sums.result_record(f, args.identity, params, result, args.digits)], args.format, out)
    return 0


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        raise UsageError(f"--seed is required (or set {SEED_ENV})")
    try:
        return int(env)
    except ValueError as exc:
        raise UsageError(f"{SEED_ENV} must be a decimal integer") from exc


def _emit_estimate(est: renewal.RenewalEstimate, extra: dict, fmt: str, out) -> None:
    rec = {**extra, **est.to_record()}
    if fmt == "json":
        out.write(json.dumps(rec, sort_keys=True) + "\n")
    elif fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        keys = sorted(rec)
        w.writerow(keys)
        w.writerow([json.dumps(rec[k]) if isinstance(rec[k], list) else rec[k] for k in keys])
    else:
        out.write(f"{est.mean_count!r} +/- {est.std_error!r} ({est.paths} paths)\n")


def cmd_simulate(args, out) -> int:
    spec = renewal.InterarrivalSpec.parse(args.law, args.delay)
    seed = _seed(args)
    est = renewal.simulate_count(spec, args.x, args.delta, args.paths, seed, n_jobs=args.jobs)
    extra = {"law": args.law, "seed": str(seed), "delay": args.delay}
    try:
        extra["blackwell_limit"] = repr(float(renewal.theoretical_blackwell_limit(spec, args.delta)))
    except DomainError:
        pass
    _emit_estimate(est, extra, args.format, out)
    return 0


def cmd_contrast(args, out) -> int:
    if args.law is not None:
        spec = renewal.InterarrivalSpec.parse(args.law, args.delay)
        seed = _seed(args)
        x = args.x if args.x is not None else Fraction(args.k)
        est = renewal.simulate_contrast_sum(spec, args.c, x, args.delta, args.paths, seed, n_jobs=args.jobs)
        extra = {"law": args.law, "seed": str(seed), "contrast": [fmt_rational(c) for c in args.c]}
        _emit_estimate(est, extra, args.format, out)
        return 0
    f = sums.Family(args.family)
    result = sums.contrast_sum(f, args.c, args.k, eps=args.eps)
    if args.format == "text":
        out.write(_text_result(result, args.digits) + "\n")
    else:
        rec = sums.result_record(f, "contrast", {"k": args.k, "c": ",".join(fmt_rational(c) for c in args.c)}, result, args.digits)
        _emit_records([rec], args.format, out)
    return 0


def cmd_converge(args, out) -> int:
    records = convergence.eulerian_gap_table(args.kmax, args.digits)
    if args.format == "csv":
        out.write(convergence.gap_table_csv(records))
    else:
        out.write(convergence.gap_table_text(records))
    if args.alpha_list:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["alpha", "k_min", "k_max", "status", "monotone", "violations", "envelope_monotone"])
        for alpha in args.alpha_list:
            rep = convergence.rate_check(float(alpha), 5, max(args.kmax, 6))
            w.writerow([fmt_rational(alpha), rep.k_range[0], rep.k_range[1], rep.status, rep.monotone, " ".join(map(str, rep.violations)), rep.envelope_monotone])
        out.write("\n" + buf.getvalue())
    return 0


# -- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="renewal-sums",
        description="Exact normalized triangle sums, certified series and renewal Monte Carlo.",
        epilog=FAMILY_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("triangle", help="print Pascal or Eulerian rows")
    s.add_argument("--kind", choices=triangles.KINDS, required=True)
    s.add_argument("--levels", type=_pos_int, required=True)
    s.add_argument("--normalized", action="store_true", help="divide each row by its sum (exact p/q)")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.set_defaults(func=cmd_triangle)

    s = sub.add_parser("parity", help="write the odd/even picture as plain PBM")
    s.add_argument("--kind", choices=triangles.KINDS, required=True)
    s.add_argument("--levels", type=_pos_int, required=True)
    s.add_argument("--out", help="output file (default stdout)")
    s.set_defaults(func=cmd_parity)

    def add_family_args(s: argparse.ArgumentParser) -> None:
        s.add_argument("--family", choices=sums.KINDS, required=True)
        s.add_argument("--identity", choices=sums.IDENTITIES, required=True)
        s.add_argument("--k", type=_nonneg_int)
        s.add_argument("--n", type=_nonneg_int)
        s.add_argument("--t", type=_rational_arg)
        s.add_argument("--h", type=_rational_arg)
        add_precision_args(s)

    def add_precision_args(s: argparse.ArgumentParser) -> None:
        s.add_argument("--eps", type=_rational_arg, default=sums.DEFAULT_EPS, help="truncation tolerance (default 1e-12)")
        s.add_argument("--digits", type=_pos_int, default=15, help="significant digits printed (default 15)")
        s.add_argument("--format", choices=("text", "json", "csv"), default="text")

    s = sub.add_parser("sum", help="evaluate a column, diagonal or alternating sum", epilog=FAMILY_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    add_family_args(s)
    s.set_defaults(func=cmd_sum)

    s = sub.add_parser("closed", help="exact right-hand side of an identity", epilog=FAMILY_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    add_family_args(s)
    s.set_defaults(func=cmd_closed)

    def add_sim_args(s: argparse.ArgumentParser, required: bool) -> None:
        s.add_argument("--law", required=required, help="uniform:a,b | bernoulli:p | betabern:a,b | usum:m | shift1:<law>")
        s.add_argument("--delay", type=_nonneg_int, default=0, help="delay S_0 = sum of this many uniforms")
        s.add_argument("--x", type=_rational_arg, required=required)
        s.add_argument("--delta", type=_rational_arg, default=Fraction(1))
        s.add_argument("--paths", type=_pos_int, default=10**5)
        s.add_argument("--seed", type=int, help=f"64-bit seed (default from ${SEED_ENV})")
        s.add_argument("--jobs", type=_pos_int, default=1, help="worker threads (does not change results)")

    s = sub.add_parser("simulate", help="Monte Carlo estimate of U(x, x+delta]")
    add_sim_args(s, required=True)
    s.add_argument("--format", choices=("text", "json", "csv"), default="text")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("contrast", help="contrast-weighted column sum (exact series, or Monte Carlo with --law)")
    s.add_argument("--c", type=_rational_list, required=True, help="contrast entries, e.g. 1,-1 (use --c=-1,1 for a leading minus)")
    s.add_argument("--family", choices=("eulerian", "binomial"), default="eulerian")
    s.add_argument("--k", type=_nonneg_int, default=0)
    add_precision_args(s)
    add_sim_args(s, required=False)
    s.set_defaults(func=cmd_contrast)

    s = sub.add_parser("converge", help="Eulerian column-sum gap table and rate check")
    s.add_argument("--kmax", type=_nonneg_int, required=True)
    s.add_argument("--digits", type=int, default=15)
    s.add_argument("--alpha-list", type=_rational_list, default=None, help="e.g. 1,2,4,8")
    s.add_argument("--format", choices=("text", "csv"), default="text")
    s.set_defaults(func=cmd_converge)
    return p


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except (UsageError, DomainError, TypeError, ValueError) as exc:
        err.write(f"renewal-sums {args.command}: error: {exc}\n")
        return 2
    except ToleranceError as exc:
        best = f" (best bound {fmt_decimal(exc.best_bound, 3)})" if exc.best_bound is not None else ""
        err.write(f"renewal-sums {args.command}: tolerance not reached: {exc}{best}\n")
        return 1


def main() -> None:
    sys.exit(run())
