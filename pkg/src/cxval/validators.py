"""The four reproducibility checks plus the exhaustive limit-cycle search.

Stability and minimum phase are decided by root analysis of the quantized
coefficient polynomials; overflow and limit cycle by exact fixed-point
replay of the counterexample.  A root modulus within MARGINAL_BAND of 1 is
flagged marginal instead of being silently tie-broken, although the verdict
itself keeps the "modulus >= 1 means violated" rule.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .counterexamples import (
    Counterexample,
    DigitalSystem,
    ImplementationSpec,
    PropertyKind,
    RealizationKind,
    effective_coefficients,
)
from .fixed_point import FixedPointFormat, Overflow, Rounding, fwl_values
from .polynomials import (
    MARGINAL_BAND,
    Polynomial,
    delta_transform,
    map_delta_roots,
    roots_of,
)
from .realizations import (
    OverflowEvent,
    SimulationConfig,
    SimulationTrace,
    Simulator,
    simulate,
)

DEFAULT_STATE_CAP = 1 << 20
STATE_CAP_ENV = "CXVAL_STATE_CAP"


@dataclass(frozen=True)
class RootEvidence:
    roots: tuple[complex, ...]
    max_modulus: float


@dataclass(frozen=True)
class OverflowEvidence:
    events: tuple[OverflowEvent, ...]


@dataclass(frozen=True)
class LcoEvidence:
    period: int
    amplitude: float
    window: tuple[float, ...]


@dataclass
class PropertyVerdict:
    property: PropertyKind
    violated: bool
    marginal: bool = False
    evidence: RootEvidence | OverflowEvidence | LcoEvidence | None = None
    trace: SimulationTrace | None = None
    diagnostics: list[str] = field(default_factory=list)


def _quantized_roots(coeffs: Sequence[float], fmt: FixedPointFormat,
                     rounding: Rounding, realization: RealizationKind,
                     delta: float | None, diagnostics: list[str]):
    poly = Polynomial.from_coeffs(coeffs)
    lead = poly.coeffs[0]
    if lead != 1.0:
        poly = Polynomial.from_coeffs([c / lead for c in poly.coeffs])
    if realization.is_delta:
        if delta is None or delta <= 0:
            raise ValueError("delta realization requires a positive delta")
        # quantization acts on the delta-domain coefficients the realization stores
        dpoly = delta_transform(poly, delta)
        quant = Polynomial.from_coeffs(fwl_values(dpoly.coeffs, fmt, rounding))
        if quant.stripped_leading:
            diagnostics.append(
                f"{quant.stripped_leading} leading coefficient(s) collapsed to zero "
                f"under quantization; order reduced")
        rset = roots_of(quant)
        roots = map_delta_roots(rset.roots, delta)
        max_mod = max((abs(r) for r in roots), default=0.0)
        return roots, max_mod
    quant = Polynomial.from_coeffs(fwl_values(poly.coeffs, fmt, rounding))
    if quant.stripped_leading:
        diagnostics.append(
            f"{quant.stripped_leading} leading coefficient(s) collapsed to zero "
            f"under quantization; order reduced")
    rset = roots_of(quant)
    return rset.roots, rset.max_modulus


def _root_check(prop: PropertyKind, coeffs: Sequence[float], fmt: FixedPointFormat,
                rounding: Rounding, realization: RealizationKind,
                delta: float | None) -> PropertyVerdict:
    diagnostics: list[str] = []
    roots, max_mod = _quantized_roots(coeffs, fmt, rounding, realization, delta, diagnostics)
    marginal = abs(max_mod - 1.0) <= MARGINAL_BAND
    if marginal:
        diagnostics.append(f"max root modulus {max_mod!r} is within {MARGINAL_BAND} of 1")
    return PropertyVerdict(
        property=prop,
        violated=max_mod >= 1.0,
        marginal=marginal,
        evidence=RootEvidence(tuple(roots), max_mod),
        diagnostics=diagnostics,
    )


def check_stability(system: DigitalSystem, fmt: FixedPointFormat,
                    rounding: Rounding = Rounding.ROUND,
                    realization: RealizationKind = RealizationKind.DFI,
                    delta: float | None = None) -> PropertyVerdict:
    """Unstable (violated) iff any quantized pole has modulus >= 1."""
    return _root_check(PropertyKind.STABILITY, system.denominator, fmt,
                       rounding, realization, delta)


def check_minimum_phase(system: DigitalSystem, fmt: FixedPointFormat,
                        rounding: Rounding = Rounding.ROUND,
                        realization: RealizationKind = RealizationKind.DFI,
                        delta: float | None = None) -> PropertyVerdict:
    """Non-minimum-phase (violated) iff any quantized zero has modulus >= 1."""
    a0 = system.denominator[0]
    coeffs = [c / a0 for c in system.numerator]
    return _root_check(PropertyKind.MINIMUM_PHASE, coeffs, fmt,
                       rounding, realization, delta)


def _replay(ce: Counterexample, rounding: Rounding, overflow: Overflow,
            past_inputs: float | None) -> tuple[SimulationTrace, list[str]]:
    num, den, notes = effective_coefficients(ce, rounding)
    cfg = SimulationConfig(
        system=DigitalSystem(tuple(num), tuple(den), ce.system.sample_time),
        impl=ce.impl,
        rounding=rounding,
        overflow=overflow,
        steps=ce.x_size,
    )
    trace = simulate(cfg, ce.inputs, ce.initial_states, past_inputs=past_inputs)
    return trace, notes + trace.diagnostics


def overflow_event_steps(trace: SimulationTrace, fmt: FixedPointFormat
                         ) -> tuple[OverflowEvent, ...]:
    """All events violating the strict range bounds, including boundary hits.

    The range formula uses strict inequalities, so an output raw value that
    lands exactly on min or max counts as overflow even though it is
    representable; such boundary hits are appended with their output stage.
    """
    events = list(trace.overflow_events)
    seen = {(e.step, e.stage) for e in events}
    frac = 1 << fmt.frac_bits
    for n, raw in enumerate(trace.raw_scaled):
        if raw in (fmt.min_scaled, fmt.max_scaled):
            if (n, "sum") not in seen and (n, "y-sum") not in seen:
                events.append(OverflowEvent(n, "boundary", raw / frac))
    events.sort(key=lambda e: (e.step, e.stage))
    return tuple(events)


def check_overflow(ce: Counterexample, rounding: Rounding = Rounding.ROUND,
                   overflow: Overflow = Overflow.WRAP) -> PropertyVerdict:
    """Replay the counterexample; violated iff any stage leaves the strict range."""
    if ce.property is not PropertyKind.OVERFLOW:
        raise ValueError("counterexample does not claim an overflow violation")
    trace, notes = _replay(ce, rounding, overflow, past_inputs=None)
    events = overflow_event_steps(trace, ce.impl.fmt)
    if any(e.stage == "boundary" for e in events):
        notes = notes + ["output hit the exact range boundary; counted as overflow "
                         "per the strict range inequalities"]
    return PropertyVerdict(
        property=PropertyKind.OVERFLOW,
        violated=bool(events),
        evidence=OverflowEvidence(events),
        trace=trace,
        diagnostics=notes,
    )


def extract_oscillation(outputs: Sequence[float]) -> tuple[int, float] | None:
    """Smallest period p whose final window of length 2p repeats exactly.

    Returns (period, amplitude) where amplitude is max - min over one period;
    None when no trailing periodicity exists.
    """
    n = len(outputs)
    if n < 2:
        return None
    for p in range(1, n // 2 + 1):
        window = outputs[n - 2 * p:]
        if all(window[k] == window[k + p] for k in range(p)):
            period = window[p:]
            return p, max(period) - min(period)
    return None


def _steady_state(ce: Counterexample) -> Fraction | None:
    num = sum(Fraction(c) for c in ce.system.numerator)
    den = sum(Fraction(c) for c in ce.system.denominator)
    if den == 0:
        return None
    return Fraction(ce.inputs[0]) * num / den


def classify_lco(ce: Counterexample, outputs: Sequence[float]
                 ) -> tuple[bool, tuple[int, float] | None, list[str]]:
    """Decide whether an output sequence exhibits a limit-cycle violation."""
    notes: list[str] = []
    osc = extract_oscillation(outputs)
    if osc is None:
        return False, None, ["no trailing periodicity in the output sequence"]
    period, amplitude = osc
    if period >= 2 and amplitude > 0:
        return True, osc, notes
    locked = outputs[-1]
    if period == 1 and locked != 0.0:
        steady = _steady_state(ce)
        if steady is None:
            notes.append("no finite linear steady state (denominator sums to zero); "
                         "locked output not classified as a dead band")
            return False, osc, notes
        quantum = Fraction(1, 1 << ce.impl.fmt.frac_bits)
        if abs(Fraction(locked) - steady) > quantum:
            notes.append(f"output locked at {locked:g}, more than one quantum from "
                         f"the linear steady state {float(steady):g} (dead band)")
            return True, osc, notes
    return False, osc, notes


def check_limit_cycle(ce: Counterexample, rounding: Rounding = Rounding.ROUND,
                      overflow: Overflow = Overflow.WRAP) -> PropertyVerdict:
    """Replay with the constant input held also across the pre-trace history."""
    if ce.property is not PropertyKind.LIMIT_CYCLE:
        raise ValueError("counterexample does not claim a limit-cycle violation")
    if len(set(ce.inputs)) > 1:
        raise ValueError("LCO requires constant input")
    constant = ce.inputs[0] if ce.inputs else 0.0
    trace, notes = _replay(ce, rounding, overflow, past_inputs=constant)
    outputs = trace.output_values
    violated, osc, lco_notes = classify_lco(ce, outputs)
    notes = notes + lco_notes
    evidence = None
    if osc is not None:
        period, amplitude = osc
        window = outputs[len(outputs) - 2 * period:]
        evidence = LcoEvidence(period, amplitude, tuple(window))
        if violated:
            cycle_steps = range(len(outputs) - 2 * period, len(outputs))
            overflow_inside = any(e.step in cycle_steps for e in trace.overflow_events)
            notes.append("overflow limit cycle" if overflow_inside else "granular limit cycle")
    return PropertyVerdict(
        property=PropertyKind.LIMIT_CYCLE,
        violated=violated,
        evidence=evidence,
        trace=trace,
        diagnostics=notes,
    )


# --- exhaustive zero-input limit-cycle absence search -------------------------

@dataclass(frozen=True)
class BauerResult:
    status: str  # "lco_free" | "lco_possible" | "undecided"
    witness: tuple[tuple[float, ...], ...] | None = None
    reason: str | None = None


def _resolve_state_cap(state_cap: int | None) -> int:
    if state_cap is not None:
        return state_cap
    env = os.environ.get(STATE_CAP_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            pass
    return DEFAULT_STATE_CAP


def bauer_lco_free(system: DigitalSystem, fmt: FixedPointFormat,
                   rounding: Rounding = Rounding.ROUND,
                   overflow: Overflow = Overflow.WRAP,
                   realization: RealizationKind = RealizationKind.DFI,
                   dyn_range: tuple[float, float] = (-1.0, 1.0),
                   state_cap: int | None = None) -> BauerResult:
    """Exhaustive zero-input search over the quantized state space.

    Every start state inside the dynamical range is simulated with zero input
    until its trajectory either reaches the all-zero state or revisits a
    state; a revisited nonzero state is a limit cycle and is returned as the
    witness.  Trajectory outcomes are memoized across start states, and start
    states are enumerated in sorted order so the lowest witness wins.
    Applies only to linearly stable systems; anything else is undecided.
    """
    cap = _resolve_state_cap(state_cap)
    stability = check_stability(system, fmt, rounding)
    if stability.violated:
        return BauerResult("undecided", reason="not linearly stable")

    a0 = system.denominator[0]
    num = fwl_values([c / a0 for c in system.numerator], fmt, rounding)
    den = fwl_values([c / a0 for c in system.denominator], fmt, rounding)
    impl = ImplementationSpec(fmt, dyn_range[0], dyn_range[1], None, realization)
    cfg = SimulationConfig(
        system=DigitalSystem(tuple(num), tuple(den), system.sample_time),
        impl=impl, rounding=rounding, overflow=overflow, steps=1,
    )
    sim = Simulator(cfg)
    dim = sim.delay_length()
    if dim == 0:
        return BauerResult("lco_free")

    frac = 1 << fmt.frac_bits
    lo = math.ceil(dyn_range[0] * frac)
    hi = math.floor(dyn_range[1] * frac)
    values = range(lo, hi + 1)
    if len(values) ** dim > cap:
        return BauerResult("undecided", reason="state space too large")

    M = sim.num_order
    is_dfi = realization is RealizationKind.DFI

    def advance(state: tuple[int, ...]) -> tuple[int, ...]:
        full = ((0,) * M + state) if is_dfi else state
        new_full, _, _, _ = sim.step(full, 0, 0)
        return new_full[M:] if is_dfi else new_full

    zero = (0,) * dim
    reaches_zero: dict[tuple[int, ...], bool] = {zero: True}
    witness: tuple[tuple[int, ...], ...] | None = None

    for start in itertools.product(values, repeat=dim):
        path: list[tuple[int, ...]] = []
        seen: dict[tuple[int, ...], int] = {}
        state = start
        while state not in reaches_zero and state not in seen:
            seen[state] = len(path)
            path.append(state)
            state = advance(state)
        if state in reaches_zero:
            outcome = reaches_zero[state]
        else:  # new cycle discovered along this trajectory
            outcome = False
            if witness is None:
                witness = tuple(path[seen[state]:])
        for visited in path:
            reaches_zero[visited] = outcome
        if not outcome and witness is not None:
            return BauerResult(
                "lco_possible",
                witness=tuple(tuple(v / frac for v in s) for s in witness),
            )
    return BauerResult("lco_free")
