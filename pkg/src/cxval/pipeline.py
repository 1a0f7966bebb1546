"""Batch validation: extract, convert, replay, compare, persist, report.

Runs every counterexample of the requested property found in a directory
through the matching validator, compares against the verifier's claim, and
persists the outcome as one JSON document plus a textual report whose layout
follows the reference validation transcript line for line.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import NamedTuple

from .counterexamples import (
    Counterexample,
    ParseError,
    PropertyKind,
    ValidationOutcome,
    scan_directory,
    write_results,
)
from .fixed_point import Overflow, Rounding, round_scaled
from .realizations import SimulationTrace
from .validators import (
    LcoEvidence,
    OverflowEvidence,
    PropertyVerdict,
    check_limit_cycle,
    check_minimum_phase,
    check_overflow,
    check_stability,
    classify_lco,
)


@dataclass(frozen=True)
class RunConfig:
    path: str
    property: PropertyKind
    overflow: Overflow = Overflow.WRAP
    rounding: Rounding = Rounding.ROUND
    out_filename: str = "digital_system"
    tolerance_quanta: int = 0  # slack for the overflow output comparison


class Comparison(NamedTuple):
    status: str           # "reproducible" | "irreproducible"
    reason: str | None


@dataclass
class RunReport:
    per_ce: list[tuple[str, float, str]] = field(default_factory=list)
    reproducible: int = 0
    irreproducible: int = 0
    errors: int = 0
    total: int = 0
    total_time: float = 0.0
    skipped: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    out_path: str | None = None
    outcomes: list[ValidationOutcome] = field(default_factory=list)


def _snap_to_grid(values, frac_bits: int) -> list[int]:
    """Claimed outputs as scaled integers, without any range handling.

    Overflow counterexamples list raw pre-handling values that may lie outside
    the representable range on purpose; snapping must not wrap or clamp them.
    """
    return [round_scaled(v, frac_bits, Rounding.ROUND) for v in values]


def compare_outcome(ce: Counterexample, verdict: PropertyVerdict,
                    trace: SimulationTrace | None = None,
                    tolerance_quanta: int = 0) -> Comparison:
    """Decide whether the replay exhibits the violation the verifier claimed."""
    if trace is None:
        trace = verdict.trace

    if ce.property in (PropertyKind.STABILITY, PropertyKind.MINIMUM_PHASE):
        if verdict.violated:
            return Comparison("reproducible", None)
        return Comparison("irreproducible",
                          "root analysis does not reproduce the claimed violation")

    if ce.property is PropertyKind.OVERFLOW:
        if not verdict.violated:
            return Comparison("irreproducible", "no overflow event in simulation")
        assert trace is not None
        frac_bits = ce.impl.fmt.frac_bits
        claimed = _snap_to_grid(ce.claimed_outputs, frac_bits)
        for n, (want, got) in enumerate(zip(claimed, trace.raw_scaled)):
            if abs(want - got) > tolerance_quanta:
                scale = 1 << frac_bits
                return Comparison(
                    "irreproducible",
                    f"output mismatch at step {n}: expected {want / scale:g}, "
                    f"got {got / scale:g}")
        return Comparison("reproducible", None)

    # limit cycle: same characteristics (period and amplitude) on both sides
    assert trace is not None
    frac_bits = ce.impl.fmt.frac_bits
    scale = 1 << frac_bits
    claimed_vals = [s / scale for s in _snap_to_grid(ce.claimed_outputs, frac_bits)]
    claimed_violates, claimed_osc, _ = classify_lco(ce, claimed_vals)
    if not claimed_violates or claimed_osc is None:
        return Comparison("irreproducible", "claimed outputs exhibit no limit cycle")
    if not verdict.violated or not isinstance(verdict.evidence, LcoEvidence):
        return Comparison("irreproducible", "no oscillation in simulation")
    sim_pair = (verdict.evidence.period, verdict.evidence.amplitude)
    if sim_pair != claimed_osc:
        return Comparison(
            "irreproducible",
            f"oscillation mismatch: claimed period {claimed_osc[0]} amplitude "
            f"{claimed_osc[1]:g}, simulated period {sim_pair[0]} amplitude "
            f"{sim_pair[1]:g}")
    return Comparison("reproducible", None)


def _dispatch(ce: Counterexample, cfg: RunConfig) -> PropertyVerdict:
    if ce.property is PropertyKind.STABILITY:
        return check_stability(ce.system, ce.impl.fmt, cfg.rounding,
                               ce.impl.realization, ce.impl.delta)
    if ce.property is PropertyKind.MINIMUM_PHASE:
        return check_minimum_phase(ce.system, ce.impl.fmt, cfg.rounding,
                                   ce.impl.realization, ce.impl.delta)
    if ce.property is PropertyKind.OVERFLOW:
        return check_overflow(ce, cfg.rounding, cfg.overflow)
    return check_limit_cycle(ce, cfg.rounding, cfg.overflow)


def _outcome_for(ce: Counterexample, verdict: PropertyVerdict,
                 comparison: Comparison, cpu_time: float) -> ValidationOutcome:
    trace = verdict.trace
    simulated: tuple[float, ...] = ()
    overflow_steps: tuple[int, ...] = ()
    lco_period = lco_amplitude = None
    if ce.property is PropertyKind.OVERFLOW and trace is not None:
        simulated = trace.outputs_raw
        if isinstance(verdict.evidence, OverflowEvidence):
            overflow_steps = tuple(sorted({e.step for e in verdict.evidence.events}))
    elif ce.property is PropertyKind.LIMIT_CYCLE and trace is not None:
        simulated = trace.output_values
        overflow_steps = tuple(sorted({e.step for e in trace.overflow_events}))
        if isinstance(verdict.evidence, LcoEvidence):
            lco_period = verdict.evidence.period
            lco_amplitude = verdict.evidence.amplitude
    diagnostics = list(ce.diagnostics) + list(verdict.diagnostics)
    if comparison.reason:
        diagnostics.append(comparison.reason)
    return ValidationOutcome(
        counterexample_id=ce.ce_id,
        status=comparison.status,
        simulated_outputs=simulated,
        overflow_steps=overflow_steps,
        lco_period=lco_period,
        lco_amplitude=lco_amplitude,
        cpu_time=cpu_time,
        diagnostics=diagnostics,
    )


def validate_one(ce: Counterexample, cfg: RunConfig) -> ValidationOutcome:
    """Validate a single counterexample, measuring CPU (not wall) time."""
    start = time.process_time()
    try:
        verdict = _dispatch(ce, cfg)
        comparison = compare_outcome(ce, verdict, verdict.trace, cfg.tolerance_quanta)
        elapsed = time.process_time() - start
        return _outcome_for(ce, verdict, comparison, elapsed)
    except (ValueError, ZeroDivisionError, OverflowError, ParseError) as exc:
        elapsed = time.process_time() - start
        return ValidationOutcome(
            counterexample_id=ce.ce_id, status="error", cpu_time=elapsed,
            diagnostics=list(ce.diagnostics) + [str(exc)],
        )


def validate_all(cfg: RunConfig) -> RunReport:
    """Validate every matching *.out counterexample under cfg.path.

    Files claiming a different property are skipped with a note; per-file
    parse failures become error outcomes rather than aborting the run.
    Results are persisted to cfg.out_filename as JSON (parse failures carry
    no counterexample data and appear only in the report).
    """
    scan = scan_directory(cfg.path)
    report = RunReport(warnings=list(scan.warnings))

    entries: list[tuple[str, Counterexample | None, str | None]] = []
    entries.extend((ce.source_path, ce, None) for ce in scan.parsed)
    entries.extend((path, None, error) for path, error in scan.failures)
    entries.sort(key=lambda item: item[0])

    persisted: list[tuple[ValidationOutcome, Counterexample]] = []
    for path, ce, error in entries:
        if error is not None:
            outcome = ValidationOutcome(
                counterexample_id=path.rsplit("/", 1)[-1].removesuffix(".out"),
                status="error", diagnostics=[error])
            report.outcomes.append(outcome)
            report.per_ce.append((outcome.counterexample_id, 0.0, "error"))
            report.errors += 1
            continue
        assert ce is not None
        if ce.property is not cfg.property:
            report.skipped.append(
                f"{path}: property {ce.property.value} does not match "
                f"{cfg.property.value}; skipped")
            continue
        outcome = validate_one(ce, cfg)
        report.outcomes.append(outcome)
        report.per_ce.append((outcome.counterexample_id, outcome.cpu_time, outcome.status))
        if outcome.status == "reproducible":
            report.reproducible += 1
        elif outcome.status == "irreproducible":
            report.irreproducible += 1
        else:
            report.errors += 1
        persisted.append((outcome, ce))

    report.total = report.reproducible + report.irreproducible + report.errors
    report.total_time = sum(t for _, t, _ in report.per_ce)
    if persisted:
        out = write_results([o for o, _ in persisted], [c for _, c in persisted],
                            cfg.out_filename, cfg.overflow.value, cfg.rounding.value)
        report.out_path = str(out)
    return report


def render_report(report: RunReport) -> str:
    """The validation transcript block, one line per counterexample."""
    lines = ["Running Automatic Validation...",
             "Counterexamples (CE) Validation Report..."]
    for i, (_, cpu, status) in enumerate(report.per_ce, start=1):
        lines.append(f"CE {i} time: {cpu:.6g} status: {status}")
    lines.append("General Report:")
    lines.append(f"Total Counterexamples Reproducible: {report.reproducible}")
    lines.append(f"Total Counterexamples Irreproducible: {report.irreproducible}")
    if report.errors:
        lines.append(f"Total Counterexamples Error: {report.errors}")
    lines.append(f"Total Counterexamples: {report.total}")
    lines.append(f"Total Execution Time: {report.total_time:.6g}")
    return "\n".join(lines)
