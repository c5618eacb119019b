"""Command-line surface: scan / theorem / const / equiv.

Exit codes: 0 = holds/success, 1 = violations or failures found,
2 = usage or resource error (including Uncertain results),
3 = equivalence inconsistency (fatal artifact bug).

Reports are emitted deterministically (sorted keys, fixed separators) so
identical configurations produce byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction

from .certified import RealNumber, DEFAULT_PRECISION_BITS, MAX_PRECISION_BITS
from .constants import (ConstantReport, cube_midpoint_integer, cube_window_k,
                        cube_window_threshold, joint_fractional_threshold,
                        min_k_for_gap_exponent, threshold_headroom_check)
from .equivalence import EquivalenceCase, check_equivalence
from .errors import CeilingExceeded, GapforgeError, PrecisionExhausted, UsageError
from .gaps import GapBoundSpec, scan
from .intervals import Family, verify_family
from .primes import DEFAULT_CEILING, PrimeEngine

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_ERROR = 2
EXIT_INCONSISTENT = 3

THEOREM_PRESETS = {
    # name -> (family, k, required primes); k None means taken from the arg
    "ingham-cube": (Family.EXP_FULL, "3", 1),
    "ingham-cube-2": (Family.EXP_FULL, "3", 2),
    "exp": (Family.EXP_FULL, None, 1),
    "sqrt5": (Family.EXP_FULL, "sqrt5", 1),
    "fractional": (Family.FRAC_TWO_SIDED, None, 1),
    "fractional-2": (Family.FRAC_TWO_SIDED, None, 2),
}


def emit_json(payload: dict, stream) -> None:
    stream.write(json.dumps(payload, sort_keys=True, separators=(",", ":")))
    stream.write("\n")


def emit_csv(rows, stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    for row in rows:
        writer.writerow(row)


def _parse_bound(text: str, truncated: bool) -> GapBoundSpec:
    if text == "bhp":
        return GapBoundSpec.bhp()
    if text == "dusart":
        return GapBoundSpec.dusart()
    if text.startswith("exp:"):
        return GapBoundSpec.exponential(text[4:], truncated=truncated)
    if text.startswith("frac-lo:"):
        return GapBoundSpec.fractional_lower(text[8:])
    if text.startswith("frac-hi:"):
        return GapBoundSpec.fractional_upper(text[8:])
    if text.startswith("custom:"):
        parts = text[7:].split(",")
        if len(parts) == 2:
            return GapBoundSpec.custom(parts[0], parts[1])
        if len(parts) == 3:
            return GapBoundSpec.custom(parts[0], parts[1], parts[2])
    raise UsageError(
        f"cannot parse bound {text!r}; expected "
        "bhp|dusart|exp:K|frac-lo:K|frac-hi:K|custom:C,T[,prev|next]")


def _engine_from_args(args) -> PrimeEngine:
    return PrimeEngine(ceiling=args.ceiling, cache_dir=args.cache_dir)


def _render_scan_text(report, stream) -> None:
    stream.write(f"bound:   {report.spec.describe()}\n")
    stream.write(f"range:   ({report.lo}, {report.hi})\n")
    stream.write(f"pairs:   {report.pairs_scanned}\n")
    stream.write(f"verdict: {report.verdict}\n")
    for pair, cv in report.violations:
        stream.write(f"  violation ({pair.p_prev}, {pair.p_next}) "
                     f"gap {pair.gap} vs bound {cv.decimal_bracket()}\n")
    for pair in report.uncertain:
        stream.write(f"  uncertain ({pair.p_prev}, {pair.p_next})\n")
    if report.max_ratio is not None:
        stream.write(f"max ratio {report.max_ratio.decimal_bracket(12)} "
                     f"at ({report.argmax_pair.p_prev}, {report.argmax_pair.p_next})\n")


def cmd_scan(args) -> int:
    spec = _parse_bound(args.bound, args.truncated)
    engine = _engine_from_args(args)
    report = scan(spec, args.range_from, args.range_to, engine,
                  prec=args.precision, max_prec=args.max_precision,
                  workers=args.workers)
    if args.format == "json":
        emit_json(report.to_json(), sys.stdout)
    elif args.format == "csv":
        emit_csv(report.csv_rows(), sys.stdout)
    else:
        _render_scan_text(report, sys.stdout)
    if report.verdict == "AllHold":
        return EXIT_OK
    if report.verdict == "Violations":
        return EXIT_VIOLATIONS
    return EXIT_ERROR


def cmd_theorem(args) -> int:
    name, _, inline_k = args.case.partition(":")
    if name not in THEOREM_PRESETS:
        raise UsageError(f"unknown case {args.case!r}; pick one of {sorted(THEOREM_PRESETS)}")
    family, preset_k, m = THEOREM_PRESETS[name]
    k = preset_k if preset_k is not None else inline_k
    if not k:
        raise UsageError(f"case {name!r} needs an inline parameter, e.g. {name}:3")
    engine = _engine_from_args(args)
    verdict = verify_family(family, RealNumber(k), m, args.range_from, args.range_to,
                            engine, prec=args.precision,
                            max_prec=args.max_precision, workers=args.workers)
    if args.format == "json":
        emit_json(verdict.to_json(), sys.stdout)
    else:
        sys.stdout.write(
            f"{name}: {family.value} k={k} require>={m} on "
            f"[{args.range_from}, {args.range_to}] -> {verdict.outcome}"
            + (f" at n={verdict.fail_n} (count {verdict.fail_count})"
               if verdict.fail_n is not None else "") + "\n")
    if verdict.outcome == "HoldsForAll":
        return EXIT_OK
    if verdict.outcome == "FailsAt":
        return EXIT_VIOLATIONS
    return EXIT_ERROR


def _parse_const(which: str, engine, prec) -> ConstantReport:
    name, _, arg = which.partition(":")
    if not arg:
        raise UsageError(f"const selector needs an argument, got {which!r}")
    if name == "cg":
        g = int(arg)
        return ConstantReport("cube-window-threshold", {"g": g},
                              cube_window_threshold(g),
                              derivation_note="g^2 * (floor(g^(2/19)) + 1), exact")
    if name == "kg":
        g = int(arg)
        return ConstantReport("cube-window-k", {"g": g}, cube_window_k(g, prec),
                              derivation_note="g^(3/2) / (g^(3/2) - (g-1)^(3/2))")
    if name == "prop5":
        return joint_fractional_threshold(arg, engine, prec)
    if name == "min-k":
        theta = Fraction(arg)
        return ConstantReport("min-k-for-gap-exponent", {"theta": theta},
                              min_k_for_gap_exponent(theta),
                              derivation_note="1/(1-theta), exact rational")
    if name == "n0":
        g = int(arg)
        n0, theta = cube_midpoint_integer(g, prec)
        return ConstantReport("cube-midpoint-integer", {"g": g}, n0,
                              derivation_note="nearest integer to (g(g-1))^(3/2)",
                              extras={"theta": theta})
    if name == "sandwich":
        g = int(arg)
        rep = threshold_headroom_check(g, prec)
        return ConstantReport("threshold-headroom", {"g": g}, int(rep.holds),
                              derivation_note="2*C(g) < (g(g-1))^(3/2), exact",
                              extras={"holds": rep.holds,
                                      "threshold": rep.threshold,
                                      "margin": rep.margin,
                                      "intermediate_holds": rep.intermediate_holds})
    raise UsageError(
        f"unknown const selector {which!r}; expected "
        "cg:G|kg:G|prop5:K|min-k:THETA|n0:G|sandwich:G")


def cmd_const(args) -> int:
    engine = _engine_from_args(args)
    report = _parse_const(args.which, engine, args.precision)
    if args.format == "json":
        emit_json(report.to_json(), sys.stdout)
    else:
        body = report.to_json()
        value = body["value"]
        rendered = value.get("exact") if isinstance(value, dict) and "exact" in value \
            else f"{value['lo']}...{value['hi']}"
        sys.stdout.write(f"{report.name}{report.inputs}: {rendered}\n")
    return EXIT_OK


def cmd_equiv(args) -> int:
    case_id = f"L{args.lemma}"
    engine = _engine_from_args(args)
    case = EquivalenceCase(case_id, RealNumber(args.k), args.range_from, args.range_to)
    report = check_equivalence(case, engine, prec=args.precision,
                               max_prec=args.max_precision)
    if args.format == "json":
        emit_json(report.to_json(), sys.stdout)
    elif args.format == "csv":
        emit_csv(report.csv_rows(), sys.stdout)
    else:
        sys.stdout.write(
            f"{case_id} k={args.k} on [{args.range_from}, {args.range_to}]: "
            f"interval side {'holds' if report.side_a_holds else 'fails'}, "
            f"gap side {'holds' if report.side_b_holds else 'fails'}, "
            f"consistent={report.consistent}\n")
    return EXIT_OK if report.consistent else EXIT_INCONSISTENT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gapforge",
        description="Certified desk-scale verification of prime-gap bounds "
                    "and prime-in-interval claims.")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ceiling", type=int,
                        default=int(os.environ.get("GAPFORGE_CEILING", DEFAULT_CEILING)),
                        help="sieve ceiling (env GAPFORGE_CEILING)")
    common.add_argument("--precision", type=int,
                        default=int(os.environ.get("GAPFORGE_PRECISION",
                                                   DEFAULT_PRECISION_BITS)),
                        help="starting certification precision in bits "
                             "(env GAPFORGE_PRECISION)")
    common.add_argument("--max-precision", type=int, default=MAX_PRECISION_BITS,
                        help="precision escalation cap in bits")
    common.add_argument("--cache-dir", default=os.environ.get("GAPFORGE_CACHE"),
                        help="sieve segment cache directory (env GAPFORGE_CACHE)")
    common.add_argument("--format", choices=["json", "csv", "text"], default="text")
    common.add_argument("--workers", type=int, default=1,
                        help="worker threads (output is identical for any value)")

    sub = parser.add_subparsers(dest="command", required=True)

    p_scan = sub.add_parser("scan", parents=[common],
                            help="scan a gap bound over consecutive primes")
    p_scan.add_argument("--bound", required=True,
                        help="bhp|dusart|exp:K|frac-lo:K|frac-hi:K|custom:C,T[,prev|next]")
    p_scan.add_argument("--from", dest="range_from", type=int, required=True)
    p_scan.add_argument("--to", dest="range_to", type=int, required=True)
    p_scan.add_argument("--truncated", action="store_true",
                        help="use 3-decimal truncated coefficients for exp bounds")
    p_scan.set_defaults(func=cmd_scan)

    p_thm = sub.add_parser("theorem", parents=[common],
                           help="verify an interval family over a range of n")
    p_thm.add_argument("--case", required=True,
                       help="ingham-cube|ingham-cube-2|exp:K|sqrt5|fractional:K|fractional-2:K")
    p_thm.add_argument("--from", dest="range_from", type=int, required=True)
    p_thm.add_argument("--to", dest="range_to", type=int, required=True)
    p_thm.set_defaults(func=cmd_theorem)

    p_const = sub.add_parser("const", parents=[common],
                             help="compute an effective constant")
    p_const.add_argument("--which", required=True,
                         help="cg:G|kg:G|prop5:K|min-k:THETA|n0:G|sandwich:G")
    p_const.set_defaults(func=cmd_const)

    p_eq = sub.add_parser("equiv", parents=[common],
                          help="check an interval/gap biconditional")
    p_eq.add_argument("--lemma", choices=["1", "5", "7"], required=True)
    p_eq.add_argument("--k", required=True)
    p_eq.add_argument("--from", dest="range_from", type=int, required=True)
    p_eq.add_argument("--to", dest="range_to", type=int, required=True)
    p_eq.set_defaults(func=cmd_equiv)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (CeilingExceeded, PrecisionExhausted) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except GapforgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
