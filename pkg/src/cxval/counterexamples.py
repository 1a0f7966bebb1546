"""Parsing of verifier ".out" counterexample files and result persistence.

The ".out" grammar is key = value lines: numbers are decimal reals, lists are
brace-delimited, the implementation format is a <n,l> token.  Verifier output
varies in key spelling ("X_Size" vs "X Size", "Dynamical_Range" vs
"Dynamic Range") and in whether the fixed-point coefficient lines carry grid
values or scaled integers; both conventions are accepted.
"""

from __future__ import annotations

import enum
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .fixed_point import FixedPointFormat, Rounding, fwl_values

SCHEMA_VERSION = "cxval-1"


class ParseError(ValueError):
    """Malformed counterexample text; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class StructuralError(ParseError):
    """Well-formed lines whose contents contradict each other."""


class PropertyKind(enum.Enum):
    STABILITY = "STABILITY"
    MINIMUM_PHASE = "MINIMUM_PHASE"
    OVERFLOW = "OVERFLOW"
    LIMIT_CYCLE = "LIMIT_CYCLE"

    @classmethod
    def from_text(cls, text: str) -> "PropertyKind":
        key = text.strip().upper().replace(" ", "_")
        try:
            return cls(key)
        except ValueError:
            raise ParseError(f"unknown property {text!r}") from None

    @classmethod
    def from_letter(cls, letter: str) -> "PropertyKind":
        table = {"m": cls.MINIMUM_PHASE, "s": cls.STABILITY,
                 "o": cls.OVERFLOW, "lc": cls.LIMIT_CYCLE}
        try:
            return table[letter.lower()]
        except KeyError:
            raise ValueError(f"unknown property code {letter!r}") from None


class RealizationKind(enum.Enum):
    DFI = "DFI"
    DFII = "DFII"
    TDFII = "TDFII"
    DDFI = "DDFI"
    DDFII = "DDFII"
    TDDFII = "TDDFII"

    @property
    def is_delta(self) -> bool:
        return self in (RealizationKind.DDFI, RealizationKind.DDFII,
                        RealizationKind.TDDFII)

    @classmethod
    def from_text(cls, text: str) -> "RealizationKind":
        try:
            return cls(text.strip().upper())
        except ValueError:
            raise ParseError(f"unknown realization {text!r}") from None


@dataclass(frozen=True)
class DigitalSystem:
    """Transfer-function coefficients (descending z^-k) and the sample time."""

    numerator: tuple[float, ...]
    denominator: tuple[float, ...]
    sample_time: float = 1.0

    def __post_init__(self):
        if not self.numerator or not self.denominator:
            raise ValueError("numerator and denominator must be non-empty")
        if self.denominator[0] == 0:
            raise ValueError("leading denominator coefficient must be nonzero")
        if not self.sample_time > 0:
            raise ValueError("sample time must be positive")


@dataclass(frozen=True)
class ImplementationSpec:
    fmt: FixedPointFormat
    dyn_min: float = -1.0
    dyn_max: float = 1.0
    delta: float | None = None
    realization: RealizationKind = RealizationKind.DFI

    def __post_init__(self):
        if not self.dyn_min < self.dyn_max:
            raise ValueError("dynamical range must satisfy min < max")
        if self.realization.is_delta and self.delta is None:
            raise ValueError("delta realization requires a delta value")
        if not self.realization.is_delta and self.delta is not None:
            raise ValueError("delta given for a non-delta realization")


@dataclass
class Counterexample:
    """One parsed verifier violation record (all fields of the .out grammar)."""

    property: PropertyKind
    system: DigitalSystem
    impl: ImplementationSpec
    x_size: int = 0
    quantized_numerator: tuple[float, ...] = ()
    quantized_denominator: tuple[float, ...] = ()
    initial_states: tuple[float, ...] = ()
    inputs: tuple[float, ...] = ()
    claimed_outputs: tuple[float, ...] = ()
    source_path: str = ""
    diagnostics: list[str] = field(default_factory=list)

    @property
    def ce_id(self) -> str:
        return Path(self.source_path).stem if self.source_path else "counterexample"


@dataclass
class ValidationOutcome:
    counterexample_id: str
    status: str  # "reproducible" | "irreproducible" | "error"
    simulated_outputs: tuple[float, ...] = ()
    overflow_steps: tuple[int, ...] = ()
    lco_period: int | None = None
    lco_amplitude: float | None = None
    cpu_time: float = 0.0
    diagnostics: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.status == "error" and not self.diagnostics:
            raise ValueError("error outcomes require diagnostics")


# --- .out parsing -----------------------------------------------------------

_FORMAT_RE = re.compile(r"^<\s*(\d+)\s*,\s*(\d+)\s*>$")
_KV_RE = re.compile(r"^\s*([^=]+?)\s*=\s*(.*?)\s*$")

_BASE_KEYS = ("property", "numerator", "denominator", "implementation", "realization")
_SIM_KEYS = ("x_size", "sample_time", "dynamical_range", "inputs", "outputs")


def _norm_key(raw: str) -> str:
    key = raw.strip().lower()
    key = re.sub(r"\s*\(fixed[- ]point\)", "_fixed_point", key)
    key = re.sub(r"[\s_]+", "_", key)
    # spelling variants seen across verifier versions
    aliases = {
        "dynamic_range": "dynamical_range",
        "delta_operator": "delta",
        "bound": "x_size",
    }
    return aliases.get(key, key)


def _parse_number(text: str, line: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"expected a number, got {text!r}", line) from None


def _parse_list(text: str, line: int) -> tuple[float, ...]:
    body = text.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise ParseError(f"expected a braced list, got {text!r}", line)
    inner = body[1:-1].strip()
    if not inner:
        return ()
    # tolerate missing commas (whitespace-separated items occur in the wild)
    items = [t for t in re.split(r"[,\s]+", inner) if t]
    return tuple(_parse_number(t, line) for t in items)


def parse_counterexample(data: str | bytes, source_path: str = "") -> Counterexample:
    """Parse one complete ".out" file body into a Counterexample.

    Preamble lines (anything without "=") are skipped.  Raises ParseError for
    malformed values or missing mandatory keys, StructuralError when field
    lengths contradict the declared bound.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"undecodable input: {exc}") from None

    fields: dict[str, tuple[object, int]] = {}
    diagnostics: list[str] = []
    fmt: FixedPointFormat | None = None

    for lineno, raw_line in enumerate(data.splitlines(), start=1):
        line = raw_line.strip()
        if not line or "=" not in line:
            continue  # preamble ("VERIFICATION FAILED", "Counterexample Data:") or blank
        match = _KV_RE.match(line)
        if not match:
            continue
        key = _norm_key(match.group(1))
        value_text = match.group(2)
        if key == "implementation":
            m = _FORMAT_RE.match(value_text)
            if not m:
                raise ParseError(f"malformed implementation token {value_text!r}", lineno)
            try:
                fmt = FixedPointFormat(int(m.group(1)), int(m.group(2)))
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
            value: object = fmt
        elif value_text.startswith("{"):
            value = _parse_list(value_text, lineno)
        elif key in ("property", "realization"):
            value = value_text.strip()
        else:
            value = _parse_number(value_text, lineno)
        if key in fields:
            diagnostics.append(f"duplicate key {key!r} at line {lineno}; last value used")
        fields[key] = (value, lineno)

    try:
        return _interpret(fields, diagnostics, fmt, source_path)
    except ParseError:
        raise
    except (TypeError, ValueError, OverflowError) as exc:
        # malformed value shapes (scalar where a list belongs, infinities, ...)
        raise ParseError(str(exc)) from None


def _interpret(fields: dict, diagnostics: list[str],
               fmt: FixedPointFormat | None, source_path: str) -> Counterexample:
    def get(key: str):
        return fields[key][0] if key in fields else None

    def require(key: str):
        if key not in fields:
            raise ParseError(f"missing mandatory key {key!r}")
        return fields[key][0]

    prop = PropertyKind.from_text(str(require("property")))
    realization = RealizationKind.from_text(str(require("realization")))

    numerator = require("numerator")
    denominator = require("denominator")
    if not isinstance(numerator, tuple) or not isinstance(denominator, tuple):
        raise ParseError("numerator/denominator must be braced lists")
    if not numerator or not denominator:
        raise ParseError("numerator/denominator must be non-empty")
    require("implementation")
    if fmt is None:
        raise ParseError("missing mandatory key 'implementation'")

    simulated = prop in (PropertyKind.OVERFLOW, PropertyKind.LIMIT_CYCLE)
    if simulated:
        for key in _SIM_KEYS:
            if key not in fields:
                raise ParseError(f"missing mandatory key {key!r} for property {prop.value}")
    sample_time = get("sample_time")
    if sample_time is None:
        sample_time = 1.0
        diagnostics.append("no sample time given; defaulted to 1.0")
    dyn = get("dynamical_range")
    if dyn is None:
        dyn = (-1.0, 1.0)
        diagnostics.append("no dynamical range given; defaulted to (-1, 1)")
    if not isinstance(dyn, tuple) or len(dyn) != 2:
        raise ParseError("dynamical range must be a two-element list")

    delta = get("delta")
    if realization.is_delta and delta is None:
        raise ParseError("missing mandatory key 'delta' for a delta realization")
    if not realization.is_delta and delta is not None:
        raise StructuralError("delta given for a non-delta realization")

    x_size_raw = get("x_size")
    x_size = int(x_size_raw) if x_size_raw is not None else 0
    if x_size_raw is not None and x_size <= 0:
        raise StructuralError(f"bound must be positive, got {x_size_raw}")

    inputs = tuple(get("inputs") or ())
    outputs = tuple(get("outputs") or ())
    initial_states = tuple(get("initial_states") or ())
    if simulated:
        if len(inputs) != x_size:
            raise StructuralError(f"{len(inputs)} inputs for declared bound {x_size}")
        if len(outputs) != x_size:
            raise StructuralError(f"{len(outputs)} outputs for declared bound {x_size}")

    qnum = tuple(get("numerator_fixed_point") or ())
    qden = tuple(get("denominator_fixed_point") or ())
    if qnum and len(qnum) != len(numerator):
        raise StructuralError("fixed-point numerator length differs from numerator")
    if qden and len(qden) != len(denominator):
        raise StructuralError("fixed-point denominator length differs from denominator")

    try:
        system = DigitalSystem(numerator, denominator, float(sample_time))
        impl = ImplementationSpec(fmt, float(dyn[0]), float(dyn[1]),
                                  float(delta) if delta is not None else None,
                                  realization)
    except ValueError as exc:
        raise StructuralError(str(exc)) from None

    return Counterexample(
        property=prop, system=system, impl=impl, x_size=x_size,
        quantized_numerator=qnum, quantized_denominator=qden,
        initial_states=initial_states, inputs=inputs, claimed_outputs=outputs,
        source_path=source_path, diagnostics=diagnostics,
    )


# --- effective coefficient selection ----------------------------------------

def effective_coefficients(ce: Counterexample, rounding: Rounding
                           ) -> tuple[list[float], list[float], list[str]]:
    """Quantized (numerator, denominator) the validation should simulate with.

    Normally this is fwl() of the raw coefficient lines (normalized so the
    leading denominator coefficient is 1).  When the file's fixed-point lines
    disagree with that, they are scaled-integer renderings of what the
    verifier actually used: if leading-fixed-point-denominator / raw a0 is an
    exact power of two 2**k, both vectors divided by 2**k land on the format
    grid, and that reading is adopted instead (recorded in diagnostics).
    """
    notes: list[str] = []
    a0 = ce.system.denominator[0]
    num = [c / a0 for c in ce.system.numerator]
    den = [c / a0 for c in ce.system.denominator]
    if a0 != 1.0:
        notes.append(f"coefficients normalized by a0 = {a0:g} before quantization")

    fmt = ce.impl.fmt
    q_num = fwl_values(num, fmt, rounding)
    q_den = fwl_values(den, fmt, rounding)
    if not ce.quantized_numerator and not ce.quantized_denominator:
        return q_num, q_den, notes

    declared = (tuple(ce.quantized_numerator), tuple(ce.quantized_denominator))
    if declared == (tuple(q_num), tuple(q_den)):
        return q_num, q_den, notes
    other = Rounding.FLOOR if rounding is Rounding.ROUND else Rounding.ROUND
    alt = (tuple(fwl_values(num, fmt, other)), tuple(fwl_values(den, fmt, other)))
    if declared == alt:
        notes.append(f"fixed-point coefficient lines match {other.value} rounding, "
                     f"not the configured {rounding.value}")
        return q_num, q_den, notes

    adopted = _scaled_integer_reading(ce, notes)
    if adopted is not None:
        return adopted[0], adopted[1], notes

    notes.append("fixed-point coefficient lines inconsistent with the declared "
                 "format; raw coefficients quantized independently")
    return q_num, q_den, notes


def _scaled_integer_reading(ce: Counterexample, notes: list[str]
                            ) -> tuple[list[float], list[float]] | None:
    qnum, qden = ce.quantized_numerator, ce.quantized_denominator
    if not qnum or not qden:
        return None
    a0 = ce.system.denominator[0]
    if a0 == 0 or qden[0] == 0:
        return None
    scale = qden[0] / a0
    if not math.isfinite(scale) or scale <= 0:
        return None
    k = math.log2(scale)
    if not math.isfinite(k) or abs(k - round(k)) > 1e-9 or round(k) < 0:
        return None
    factor = 2.0 ** round(k)
    cand_num = [v / factor for v in qnum]
    cand_den = [v / factor for v in qden]
    fmt = ce.impl.fmt
    step = 1 << fmt.frac_bits
    lo, hi = float(fmt.min_value), float(fmt.max_value)
    for v in cand_num + cand_den:
        if not (lo <= v <= hi) or (v * step) != int(v * step):
            return None
    d0 = cand_den[0]
    cand_num = [v / d0 for v in cand_num]
    cand_den = [v / d0 for v in cand_den]
    notes.append(f"fixed-point coefficient lines interpreted as scaled integers "
                 f"(x 2^-{round(k)}); raw coefficient lines are inconsistent and "
                 f"were ignored for simulation")
    return cand_num, cand_den


# --- canonical .out rendering ------------------------------------------------

def _fmt_num(v: float) -> str:
    if float(v).is_integer():
        return str(int(v))
    return repr(float(v))


def _fmt_list(vals: Sequence[float]) -> str:
    return "{ " + ", ".join(_fmt_num(v) for v in vals) + " }"


def counterexample_to_out(ce: Counterexample) -> str:
    """Render a record back to the ".out" grammar (parse round-trips exactly)."""
    lines = [
        f"Property = {ce.property.value}",
        f"Numerator = {_fmt_list(ce.system.numerator)}",
        f"Denominator = {_fmt_list(ce.system.denominator)}",
    ]
    if ce.x_size:
        lines.append(f"X_Size = {ce.x_size}")
    lines.append(f"Sample_Time = {_fmt_num(ce.system.sample_time)}")
    lines.append(f"Implementation = <{ce.impl.fmt.int_bits},{ce.impl.fmt.frac_bits}>")
    if ce.quantized_numerator:
        lines.append(f"Numerator (fixed-point) = {_fmt_list(ce.quantized_numerator)}")
    if ce.quantized_denominator:
        lines.append(f"Denominator (fixed-point) = {_fmt_list(ce.quantized_denominator)}")
    if ce.impl.delta is not None:
        lines.append(f"Delta = {_fmt_num(ce.impl.delta)}")
    lines.append(f"Realization = {ce.impl.realization.value}")
    lines.append(f"Dynamical_Range = {_fmt_list((ce.impl.dyn_min, ce.impl.dyn_max))}")
    if ce.initial_states:
        lines.append(f"Initial_States = {_fmt_list(ce.initial_states)}")
    if ce.inputs:
        lines.append(f"Inputs = {_fmt_list(ce.inputs)}")
    if ce.claimed_outputs:
        lines.append(f"Outputs = {_fmt_list(ce.claimed_outputs)}")
    return "\n".join(lines) + "\n"


# --- directory scanning -------------------------------------------------------

@dataclass
class ScanResult:
    parsed: list[Counterexample] = field(default_factory=list)
    failures: list[tuple[str, str]] = field(default_factory=list)  # (path, error)
    warnings: list[str] = field(default_factory=list)


def scan_directory(path: str | Path) -> ScanResult:
    """Parse every *.out file under path, lexicographically by filename.

    Per-file parse failures are isolated into ScanResult.failures rather than
    aborting the scan.
    """
    root = Path(path)
    if not root.is_dir():
        raise NotADirectoryError(f"not a readable directory: {path}")
    result = ScanResult()
    files = sorted(root.glob("*.out"), key=lambda p: p.name)
    if not files:
        result.warnings.append(f"no .out files found in {root}")
    for file in files:
        try:
            ce = parse_counterexample(file.read_bytes(), source_path=str(file))
            result.parsed.append(ce)
        except ParseError as exc:
            result.failures.append((str(file), str(exc)))
    return result


# --- JSON result persistence ---------------------------------------------------

def _transfer_function_text(system: DigitalSystem) -> str:
    def poly(coeffs):
        terms = []
        for k, c in enumerate(coeffs):
            if k == 0:
                terms.append(_fmt_num(c))
            else:
                sign = "-" if c < 0 else "+"
                terms.append(f"{sign} {_fmt_num(abs(c))}*z^-{k}")
        return " ".join(terms)

    return f"({poly(system.numerator)}) / ({poly(system.denominator)})"


def result_record(outcome: ValidationOutcome, ce: Counterexample,
                  overflow_mode: str = "wrap", rounding_mode: str = "round") -> dict:
    """One report record: the counterexample data plus the validation outputs."""
    impl = ce.impl
    record = {
        "schema": SCHEMA_VERSION,
        "counterexample": {
            "id": outcome.counterexample_id,
            "property": ce.property.value,
        },
        "digital_system": {
            "numerator": list(ce.system.numerator),
            "denominator": list(ce.system.denominator),
            "numerator_fixed_point": list(ce.quantized_numerator),
            "denominator_fixed_point": list(ce.quantized_denominator),
            "transfer_function": _transfer_function_text(ce.system),
        },
        "inputs": {
            "input_vector": list(ce.inputs),
            "initial_states": list(ce.initial_states),
        },
        "implementation": {
            "int_bits": impl.fmt.int_bits,
            "frac_bits": impl.fmt.frac_bits,
            "dynamical_range": [impl.dyn_min, impl.dyn_max],
            "delta": impl.delta,
            "sample_time": ce.system.sample_time,
            "bound": ce.x_size,
            "realization": impl.realization.value,
            "overflow_mode": overflow_mode,
            "rounding_mode": rounding_mode,
        },
        "outputs": {
            "verifier_outputs": list(ce.claimed_outputs),
            "simulated_outputs": list(outcome.simulated_outputs),
            "overflow_steps": list(outcome.overflow_steps),
            "lco_period": outcome.lco_period,
            "lco_amplitude": outcome.lco_amplitude,
            "cpu_time": outcome.cpu_time,
            "status": outcome.status,
            "diagnostics": list(outcome.diagnostics),
        },
    }
    return record


def write_results(outcomes: Sequence[ValidationOutcome], ces: Sequence[Counterexample],
                  filename: str | Path, overflow_mode: str = "wrap",
                  rounding_mode: str = "round") -> Path:
    """Persist parallel outcome/counterexample lists as one JSON document."""
    if len(outcomes) != len(ces):
        raise ValueError("outcomes and counterexamples must be parallel lists")
    path = Path(filename)
    if path.suffix != ".json":
        path = path.with_name(path.name + ".json")
    records = [result_record(o, c, overflow_mode, rounding_mode)
               for o, c in zip(outcomes, ces)]
    path.write_text(json.dumps(records, indent=2) + "\n", encoding="utf-8")
    return path


def load_results(filename: str | Path) -> list[dict]:
    with open(filename, encoding="utf-8") as handle:
        data = json.load(handle)
    if not isinstance(data, list):
        raise ValueError("malformed results file: expected a JSON array")
    return data


def counterexample_from_record(record: dict) -> tuple[Counterexample, Rounding, str]:
    """Rebuild a Counterexample (plus the run's modes) from a report record."""
    try:
        impl = record["implementation"]
        system = DigitalSystem(
            tuple(record["digital_system"]["numerator"]),
            tuple(record["digital_system"]["denominator"]),
            float(impl.get("sample_time") or 1.0),
        )
        spec = ImplementationSpec(
            FixedPointFormat(int(impl["int_bits"]), int(impl["frac_bits"])),
            float(impl["dynamical_range"][0]), float(impl["dynamical_range"][1]),
            impl.get("delta"),
            RealizationKind.from_text(impl["realization"]),
        )
        ce = Counterexample(
            property=PropertyKind.from_text(record["counterexample"]["property"]),
            system=system,
            impl=spec,
            x_size=int(impl.get("bound") or 0),
            quantized_numerator=tuple(record["digital_system"].get("numerator_fixed_point") or ()),
            quantized_denominator=tuple(record["digital_system"].get("denominator_fixed_point") or ()),
            initial_states=tuple(record["inputs"].get("initial_states") or ()),
            inputs=tuple(record["inputs"].get("input_vector") or ()),
            claimed_outputs=tuple(record["outputs"].get("verifier_outputs") or ()),
            source_path=record["counterexample"].get("id", ""),
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise ValueError(f"malformed result record: {exc}") from None
    rounding = Rounding(impl.get("rounding_mode", "round"))
    overflow_mode = impl.get("overflow_mode", "wrap")
    return ce, rounding, overflow_mode
