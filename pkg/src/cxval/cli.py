"""Command-line front end.

Subcommands mirror the toolbox entry points: `validate` runs a directory of
counterexamples against one property (letter codes: m, s, o, lc), `fwl`
quantizes a coefficient vector, `simulate-stability` and
`simulate-minimum-phase` answer successful/failed for a system, and the
plot-* subcommands turn a report record into CSV + JSON series plus a PNG.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .counterexamples import (
    DigitalSystem,
    PropertyKind,
    counterexample_from_record,
    load_results,
)
from .fixed_point import FixedPointFormat, Overflow, Rounding, fwl_values
from .pipeline import RunConfig, render_report, validate_all
from .validators import (
    PropertyKind as _PK,
    RealizationKind,
    check_limit_cycle,
    check_minimum_phase,
    check_overflow,
    check_stability,
)
from . import plots


def _parse_coeffs(text: str) -> list[float]:
    items = [t for t in text.replace(",", " ").split() if t]
    if not items:
        raise argparse.ArgumentTypeError("empty coefficient list")
    try:
        return [float(t) for t in items]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_format_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--int-bits", type=int, default=16,
                        help="integer bits including sign (default 16)")
    parser.add_argument("--frac-bits", type=int, required=True,
                        help="fractional bits")
    parser.add_argument("--rounding", choices=["round", "floor"], default="round")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cxval",
        description="Replay and validate verifier counterexamples for "
                    "fixed-point digital systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a directory of .out counterexamples")
    p.add_argument("--path", required=True, help="directory with the counterexamples")
    p.add_argument("--property", required=True, choices=["m", "s", "o", "lc"],
                   help="m: minimum phase, s: stability, o: overflow, lc: limit cycle")
    p.add_argument("--overflow-mode", choices=["wrap", "saturate"], default="wrap")
    p.add_argument("--rounding", choices=["round", "floor"], default="round")
    p.add_argument("--out", default="digital_system",
                   help="report filename (default digital_system)")
    p.add_argument("--tolerance", type=int, default=0,
                   help="overflow output comparison slack, in quanta (default 0)")

    p = sub.add_parser("fwl", help="quantize a coefficient vector")
    p.add_argument("--coeffs", required=True, type=_parse_coeffs,
                   help='comma-separated coefficients, e.g. "1,1.8,1.14,0.272"')
    _add_format_flags(p)

    for name, helptext in (("simulate-stability", "check pole moduli under FWL"),
                           ("simulate-minimum-phase", "check zero moduli under FWL")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--num", required=True, type=_parse_coeffs,
                       help="numerator coefficients")
        p.add_argument("--den", required=True, type=_parse_coeffs,
                       help="denominator coefficients")
        _add_format_flags(p)
        p.add_argument("--realization",
                       choices=[r.value for r in RealizationKind], default="DFI")
        p.add_argument("--delta", type=float, default=None,
                       help="delta operator (delta realizations only)")
        p.add_argument("--sample-time", type=float, default=1.0)

    for name in ("plot-overflow", "plot-limit-cycle", "plot-zero-pole"):
        p = sub.add_parser(name, help=f"emit {name[5:]} series from a report record")
        p.add_argument("--report", required=True, help="cxval JSON report file")
        p.add_argument("--index", type=int, default=1,
                       help="1-based record index (default 1)")
        p.add_argument("--out-base", default=None,
                       help="output path without extension")
    return parser


def _cmd_validate(args) -> int:
    cfg = RunConfig(
        path=args.path,
        property=PropertyKind.from_letter(args.property),
        overflow=Overflow(args.overflow_mode),
        rounding=Rounding(args.rounding),
        out_filename=args.out,
        tolerance_quanta=args.tolerance,
    )
    try:
        report = validate_all(cfg)
    except (OSError, NotADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for note in report.warnings + report.skipped:
        print(note, file=sys.stderr)
    print(render_report(report))
    if report.out_path:
        print(f"Results written to {report.out_path}", file=sys.stderr)
    return 0 if report.irreproducible == 0 and report.errors == 0 else 1


def _cmd_fwl(args) -> int:
    fmt = FixedPointFormat(args.int_bits, args.frac_bits)
    values = fwl_values(args.coeffs, fmt, Rounding(args.rounding))
    print(" ".join(f"{v:.4f}" for v in values))
    return 0


def _cmd_simulate_roots(args, minimum_phase: bool) -> int:
    fmt = FixedPointFormat(args.int_bits, args.frac_bits)
    system = DigitalSystem(tuple(args.num), tuple(args.den), args.sample_time)
    realization = RealizationKind.from_text(args.realization)
    if realization.is_delta and args.delta is None:
        print("usage error: --delta is required for delta realizations",
              file=sys.stderr)
        return 2
    if not realization.is_delta and args.delta is not None:
        print("usage error: --delta applies only to delta realizations",
              file=sys.stderr)
        return 2
    check = check_minimum_phase if minimum_phase else check_stability
    try:
        verdict = check(system, fmt, Rounding(args.rounding), realization, args.delta)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print("failed" if verdict.violated else "successful")
    if verdict.marginal:
        print("note: a root modulus lies within tolerance of 1", file=sys.stderr)
    return 0


def _cmd_plot(args, kind: str) -> int:
    try:
        records = load_results(args.report)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if not 1 <= args.index <= len(records):
        print(f"error: index {args.index} outside 1..{len(records)}", file=sys.stderr)
        return 1
    try:
        ce, rounding, overflow_mode = counterexample_from_record(records[args.index - 1])
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    stem = Path(args.report).stem
    base = args.out_base or f"{stem}_ce{args.index}_{kind.replace('-', '_')}"
    try:
        if kind == "zero-pole":
            plot = plots.pole_zero_series(ce.system, ce.impl.fmt, rounding,
                                          ce.impl.realization, ce.impl.delta)
        elif kind == "overflow":
            if ce.property is not _PK.OVERFLOW:
                print("error: record does not hold an overflow counterexample",
                      file=sys.stderr)
                return 1
            verdict = check_overflow(ce, rounding, Overflow(overflow_mode))
            plot = plots.overflow_series(ce, verdict.trace)
        else:
            if ce.property is not _PK.LIMIT_CYCLE:
                print("error: record does not hold a limit-cycle counterexample",
                      file=sys.stderr)
                return 1
            verdict = check_limit_cycle(ce, rounding, Overflow(overflow_mode))
            plot = plots.lco_series(ce, verdict.trace)
        written = plots.write_plot(plot, base)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "fwl":
            return _cmd_fwl(args)
        if args.command == "simulate-stability":
            return _cmd_simulate_roots(args, minimum_phase=False)
        if args.command == "simulate-minimum-phase":
            return _cmd_simulate_roots(args, minimum_phase=True)
        if args.command == "plot-overflow":
            return _cmd_plot(args, "overflow")
        if args.command == "plot-limit-cycle":
            return _cmd_plot(args, "limit-cycle")
        return _cmd_plot(args, "zero-pole")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
