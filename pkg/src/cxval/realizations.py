"""Fixed-point time-domain simulation of the difference equation.

Supported computation templates: direct form I, direct form II, and
transposed direct form II.  Delta forms are analyzed for stability and
minimum phase only and cannot be simulated here.

Every elementary operation applies the overflow mode, not only the final
output: each product is formed exactly and rounded/overflow-handled once
(its own stage), and each accumulation is summed exactly on the grid and
handled once at the stage boundary.  The optional "term" accumulator policy
instead handles the running sum after every addition, mirroring verifier
loops that re-quantize per operation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .counterexamples import DigitalSystem, ImplementationSpec, RealizationKind
from .fixed_point import (
    FixedPointFormat,
    FxNum,
    Overflow,
    Rounding,
    _div_round,
    handle_overflow,
    round_scaled,
)


class OverflowEvent(NamedTuple):
    step: int
    stage: str
    raw: float  # pre-handling value


@dataclass(frozen=True)
class SimulationConfig:
    system: DigitalSystem          # coefficients already FWL-quantized
    impl: ImplementationSpec
    rounding: Rounding = Rounding.ROUND
    overflow: Overflow = Overflow.WRAP
    steps: int = 1
    accumulator: str = "stage"     # "stage" | "term"

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.impl.realization.is_delta:
            raise ValueError(f"realization {self.impl.realization.value} is not simulable")
        if self.accumulator not in ("stage", "term"):
            raise ValueError("accumulator must be 'stage' or 'term'")


@dataclass
class SimulationTrace:
    outputs_raw: tuple[float, ...]       # pre-overflow-handling result per step
    outputs_fx: tuple[FxNum, ...]        # post-handling outputs
    overflow_events: tuple[OverflowEvent, ...]
    states_final: tuple[float, ...]
    raw_scaled: tuple[int, ...] = ()     # outputs_raw as exact scaled integers
    diagnostics: list[str] = field(default_factory=list)

    @property
    def output_values(self) -> tuple[float, ...]:
        return tuple(o.value for o in self.outputs_fx)


def state_dimension(realization: RealizationKind, den_order: int, num_order: int) -> int:
    """Natural state count: separate delay lines for DFI, canonical otherwise."""
    if realization.is_delta:
        raise ValueError(f"realization {realization.value} is not simulable")
    if den_order < 0 or num_order < 0:
        raise ValueError("orders must be non-negative")
    if realization is RealizationKind.DFI:
        return den_order + num_order
    return max(den_order, num_order)


class Simulator:
    """Step engine over scaled-integer state tuples.

    State layout (most recent first):
      DFI    -- (x(n-1)..x(n-M), y(n-1)..y(n-N)), split at num_order
      DFII   -- (w(n-1)..w(n-K))          with K = max(N, M)
      TDFII  -- (s_1(n-1)..s_K(n-1))

    The initial-state vector of a counterexample uses the verifier's array
    layout: most recent value LAST, and when it is one element longer than
    the delay line the first slot is scratch and ignored.
    """

    def __init__(self, cfg: SimulationConfig):
        self.cfg = cfg
        self.fmt = cfg.impl.fmt
        self.rounding = cfg.rounding
        self.overflow = cfg.overflow
        self.diagnostics: list[str] = []

        num = list(cfg.system.numerator)
        den = list(cfg.system.denominator)
        if den[0] != 1.0:
            a0 = den[0]
            num = [c / a0 for c in num]
            den = [c / a0 for c in den]
            self.diagnostics.append(f"coefficients normalized by a0 = {a0:g}")
        frac = self.fmt.frac_bits
        self.b = [self._coeff(c) for c in num]
        self.a = [self._coeff(c) for c in den]
        self.num_order = len(self.b) - 1
        self.den_order = len(self.a) - 1
        self.kind = cfg.impl.realization

    def _coeff(self, value: float) -> int:
        scaled = round_scaled(value, self.fmt.frac_bits, self.rounding)
        handled, changed = handle_overflow(scaled, self.fmt, Overflow.SATURATE)
        if changed:
            self.diagnostics.append(f"coefficient {value:g} saturated to format {self.fmt}")
        return handled

    def to_scaled(self, value: float) -> tuple[int, bool]:
        scaled = round_scaled(value, self.fmt.frac_bits, self.rounding)
        return handle_overflow(scaled, self.fmt, self.overflow)

    # - state construction -

    def delay_length(self) -> int:
        if self.kind is RealizationKind.DFI:
            return self.den_order
        return max(self.den_order, self.num_order)

    def zero_state(self) -> tuple[int, ...]:
        if self.kind is RealizationKind.DFI:
            return (0,) * (self.num_order + self.den_order)
        return (0,) * self.delay_length()

    def initial_state(self, initial_states: Sequence[float],
                      past_input: float = 0.0) -> tuple[int, ...]:
        vec = [self.to_scaled(v)[0] for v in initial_states]
        nline = self.delay_length()
        if len(vec) == nline + 1:
            self.diagnostics.append(
                "initial-state vector carries the verifier's scratch slot; first entry ignored")
            vec = vec[1:]
        extras: list[int] = []
        if len(vec) > nline:
            if self.kind is not RealizationKind.DFI or len(vec) - nline > self.num_order:
                raise ValueError("state dimension mismatch")
            extras, vec = vec[:-nline], vec[-nline:]
        line = [0] * (nline - len(vec)) + vec
        line.reverse()  # most recent (last in the file) first internally

        if self.kind is not RealizationKind.DFI:
            return tuple(line)
        xp, _ = self.to_scaled(past_input)
        xline = [xp] * self.num_order
        for j, v in enumerate(reversed(extras)):
            if j < self.num_order:
                xline[j] = v
        return tuple(xline) + tuple(line)

    # - elementary stages -

    def _mul(self, coeff_scaled: int, value_scaled: int,
             step: int, stage: str, events: list[OverflowEvent]) -> int:
        raw = _div_round(coeff_scaled * value_scaled, 1 << self.fmt.frac_bits, self.rounding)
        handled, flagged = handle_overflow(raw, self.fmt, self.overflow)
        if flagged:
            events.append(OverflowEvent(step, stage, raw / (1 << self.fmt.frac_bits)))
        return handled

    def _acc(self, terms: Iterable[int], step: int, stage: str,
             events: list[OverflowEvent]) -> tuple[int, int]:
        """Accumulate on-grid terms; returns (raw sum, handled sum)."""
        if self.cfg.accumulator == "term":
            acc = 0
            raw = 0
            for t in terms:
                raw = acc + t
                acc, flagged = handle_overflow(raw, self.fmt, self.overflow)
                if flagged:
                    events.append(OverflowEvent(step, stage, raw / (1 << self.fmt.frac_bits)))
            return raw, acc
        raw = sum(terms)
        handled, flagged = handle_overflow(raw, self.fmt, self.overflow)
        if flagged:
            events.append(OverflowEvent(step, stage, raw / (1 << self.fmt.frac_bits)))
        return raw, handled

    # - per-realization steps -

    def step(self, state: tuple[int, ...], x_scaled: int, step_index: int
             ) -> tuple[tuple[int, ...], int, int, list[OverflowEvent]]:
        """One sample: returns (state', y_post, y_raw, events)."""
        if self.kind is RealizationKind.DFI:
            return self._step_dfi(state, x_scaled, step_index)
        if self.kind is RealizationKind.DFII:
            return self._step_dfii(state, x_scaled, step_index)
        return self._step_tdfii(state, x_scaled, step_index)

    def _step_dfi(self, state, x, n):
        events: list[OverflowEvent] = []
        M, N = self.num_order, self.den_order
        xpast, ypast = state[:M], state[M:]
        terms = [self._mul(self.b[0], x, n, "mul:b0", events)]
        for k in range(1, M + 1):
            terms.append(self._mul(self.b[k], xpast[k - 1], n, f"mul:b{k}", events))
        for k in range(1, N + 1):
            terms.append(self._mul(-self.a[k], ypast[k - 1], n, f"mul:a{k}", events))
        raw, y = self._acc(terms, n, "sum", events)
        new_x = ((x,) + xpast[:-1]) if M else ()
        new_y = ((y,) + ypast[:-1]) if N else ()
        return new_x + new_y, y, raw, events

    def _step_dfii(self, state, x, n):
        events: list[OverflowEvent] = []
        M, N = self.num_order, self.den_order
        wpast = state
        terms = [x]
        for k in range(1, N + 1):
            terms.append(-self._mul(self.a[k], wpast[k - 1], n, f"mul:a{k}", events))
        _, w = self._acc(terms, n, "w-sum", events)
        terms = [self._mul(self.b[0], w, n, "mul:b0", events)]
        for k in range(1, M + 1):
            terms.append(self._mul(self.b[k], wpast[k - 1], n, f"mul:b{k}", events))
        raw, y = self._acc(terms, n, "y-sum", events)
        new_w = ((w,) + wpast[:-1]) if wpast else ()
        return new_w, y, raw, events

    def _step_tdfii(self, state, x, n):
        events: list[OverflowEvent] = []
        K = self.delay_length()
        b = self.b + [0] * (K + 1 - len(self.b))
        a = self.a + [0] * (K + 1 - len(self.a))
        first = self._mul(b[0], x, n, "mul:b0", events)
        raw, y = self._acc([first, state[0]] if K else [first], n, "y-sum", events)
        new_s = []
        for i in range(1, K + 1):
            terms = [self._mul(b[i], x, n, f"mul:b{i}", events),
                     -self._mul(a[i], y, n, f"mul:a{i}", events)]
            if i < K:
                terms.append(state[i])
            _, si = self._acc(terms, n, f"s{i}-sum", events)
            new_s.append(si)
        return tuple(new_s), y, raw, events


def simulate(cfg: SimulationConfig, inputs: Sequence[float],
             initial_states: Sequence[float] = (),
             past_inputs: float | Sequence[float] | None = None) -> SimulationTrace:
    """Run the configured realization over the input sequence.

    ``past_inputs`` seeds the input delay line (DFI only): a scalar fills it
    with a constant, as limit-cycle replays require; None means zeros.
    """
    if len(inputs) != cfg.steps:
        raise ValueError(f"{len(inputs)} inputs for {cfg.steps} steps")
    sim = Simulator(cfg)
    past = float(past_inputs) if isinstance(past_inputs, (int, float)) else 0.0
    state = sim.initial_state(initial_states, past_input=past)
    if past_inputs is not None and not isinstance(past_inputs, (int, float)):
        seq = [sim.to_scaled(v)[0] for v in past_inputs]
        M = sim.num_order
        if sim.kind is not RealizationKind.DFI or len(seq) > M:
            raise ValueError("past input sequence does not fit the input delay line")
        xline = list(state[:M])
        for j, v in enumerate(seq):  # most recent first
            xline[j] = v
        state = tuple(xline) + state[M:]

    frac = 1 << cfg.impl.fmt.frac_bits
    raws: list[int] = []
    outs: list[FxNum] = []
    events: list[OverflowEvent] = []
    for n, value in enumerate(inputs):
        x, changed = sim.to_scaled(value)
        if changed:
            sim.diagnostics.append(f"input {value:g} at step {n} forced into range")
        state, y, raw, step_events = sim.step(state, x, n)
        raws.append(raw)
        outs.append(FxNum(y, cfg.impl.fmt))
        events.extend(step_events)
    return SimulationTrace(
        outputs_raw=tuple(r / frac for r in raws),
        outputs_fx=tuple(outs),
        overflow_events=tuple(events),
        states_final=tuple(s / frac for s in state),
        raw_scaled=tuple(raws),
        diagnostics=sim.diagnostics,
    )
