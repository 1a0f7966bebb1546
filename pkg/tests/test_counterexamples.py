import json
import random

import pytest

from cxval.counterexamples import (
    Counterexample,
    DigitalSystem,
    ImplementationSpec,
    ParseError,
    PropertyKind,
    RealizationKind,
    StructuralError,
    ValidationOutcome,
    counterexample_from_record,
    counterexample_to_out,
    effective_coefficients,
    load_results,
    parse_counterexample,
    result_record,
    scan_directory,
    write_results,
)
from cxval.fixed_point import FixedPointFormat, Rounding


def test_parse_lco_record(fig_lco_text):
    ce = parse_counterexample(fig_lco_text, "fig1.out")
    assert ce.property is PropertyKind.LIMIT_CYCLE
    assert ce.system.numerator == (2002.0, -4000.0, 1998.0)
    assert ce.system.denominator == (1.0, 0.0, -1.0)
    assert ce.x_size == 10
    assert ce.system.sample_time == 0.001
    assert ce.impl.fmt == FixedPointFormat(13, 3)
    assert ce.impl.realization is RealizationKind.DFI
    assert (ce.impl.dyn_min, ce.impl.dyn_max) == (-1.0, 1.0)
    assert ce.initial_states == (-0.875, 0.0, -1.0)
    assert ce.inputs == (0.5,) * 10
    assert ce.claimed_outputs == (0.0, -1.0) * 5


def test_parse_overflow_record_with_variant_spellings(fig_overflow_text):
    ce = parse_counterexample(fig_overflow_text, "fig8.out")
    assert ce.property is PropertyKind.OVERFLOW
    assert ce.impl.fmt == FixedPointFormat(10, 6)
    assert ce.impl.realization is RealizationKind.DFI
    assert ce.x_size == 10
    assert len(ce.inputs) == 10  # missing comma tolerated
    assert 512.0 in ce.claimed_outputs
    assert ce.quantized_numerator == (384.0, -128.0)


def test_stability_record_needs_no_inputs():
    text = """Property = STABILITY
Numerator = { 1.0, -0.5 }
Denominator = { 1.0, -0.25 }
Sample_Time = 0.01
Implementation = <8,8>
Realization = DFI
Dynamical_Range = { -1, 1 }
"""
    ce = parse_counterexample(text)
    assert ce.property is PropertyKind.STABILITY
    assert ce.inputs == ()
    assert ce.claimed_outputs == ()
    assert ce.initial_states == ()


def test_missing_mandatory_key_is_named():
    text = "Property = OVERFLOW\nNumerator = { 1 }\nDenominator = { 1 }\n" \
           "Implementation = <8,8>\nRealization = DFI\n"
    with pytest.raises(ParseError, match="x_size"):
        parse_counterexample(text)


def test_malformed_implementation_token():
    text = "Property = STABILITY\nNumerator = { 1 }\nDenominator = { 1 }\n" \
           "Implementation = <8;8>\nRealization = DFI\n"
    with pytest.raises(ParseError, match="implementation"):
        parse_counterexample(text)


def test_input_count_mismatch_is_structural(fig_lco_text):
    broken = fig_lco_text.replace("X_Size = 10", "X_Size = 9")
    with pytest.raises(StructuralError):
        parse_counterexample(broken)


def test_delta_required_for_delta_realizations():
    text = """Property = STABILITY
Numerator = { 1.0 }
Denominator = { 1.0, -0.5 }
Implementation = <8,8>
Realization = DDFI
"""
    with pytest.raises(ParseError, match="delta"):
        parse_counterexample(text)
    ce = parse_counterexample(text + "Delta = 0.25\n")
    assert ce.impl.delta == 0.25


def test_spurious_delta_rejected():
    text = """Property = STABILITY
Numerator = { 1.0 }
Denominator = { 1.0, -0.5 }
Implementation = <8,8>
Realization = DFI
Delta = 0.25
"""
    with pytest.raises(StructuralError):
        parse_counterexample(text)


def test_roundtrip_through_out_grammar(fig_lco_text, fig_overflow_text):
    for text, name in ((fig_lco_text, "a.out"), (fig_overflow_text, "b.out")):
        ce = parse_counterexample(text, name)
        again = parse_counterexample(counterexample_to_out(ce), name)
        # diagnostics describe the parse, not the record
        again.diagnostics = ce.diagnostics = []
        assert again == ce


def test_parser_totality_small_fuzz(fig_lco_text):
    rng = random.Random(1234)
    corpus = fig_lco_text
    for _ in range(300):
        text = list(corpus)
        for _ in range(rng.randint(1, 6)):
            kind = rng.randrange(3)
            pos = rng.randrange(len(text))
            if kind == 0:
                text[pos] = chr(rng.randrange(32, 127))
            elif kind == 1:
                del text[pos]
            else:
                text.insert(pos, chr(rng.randrange(32, 127)))
        try:
            parse_counterexample("".join(text))
        except ParseError:
            pass  # structured failure is the contract


# --- effective coefficient selection -----------------------------------------

def test_consistent_fixed_point_lines_use_fwl(fig_lco_text):
    ce = parse_counterexample(fig_lco_text)
    num, den, notes = effective_coefficients(ce, Rounding.ROUND)
    assert num == [2002.0, -4000.0, 1998.0]
    assert den == [1.0, 0.0, -1.0]
    assert notes == []


def test_scaled_integer_lines_recovered(fig_overflow_text):
    ce = parse_counterexample(fig_overflow_text)
    num, den, notes = effective_coefficients(ce, Rounding.ROUND)
    assert num == [1.5, -0.5]
    assert den == [1.0, 0.0]
    assert any("scaled integers" in n for n in notes)


def test_scaled_integer_lines_in_plain_value_scale():
    # fixed-point lines written as scaled integers even though they agree
    text = """Property = STABILITY
Numerator = { 1.0, -0.5 }
Denominator = { 1.0, 0.25 }
Implementation = <13,3>
Numerator (fixed-point) = { 8, -4 }
Denominator (fixed-point) = { 8, 2 }
Realization = DFI
"""
    ce = parse_counterexample(text)
    num, den, _ = effective_coefficients(ce, Rounding.ROUND)
    assert num == [1.0, -0.5]
    assert den == [1.0, 0.25]


def test_inconsistent_lines_fall_back_to_fwl():
    text = """Property = STABILITY
Numerator = { 1.0, -0.5 }
Denominator = { 1.0, 0.25 }
Implementation = <13,3>
Numerator (fixed-point) = { 3.3, -4.7 }
Denominator (fixed-point) = { 9.1, 2.2 }
Realization = DFI
"""
    ce = parse_counterexample(text)
    num, den, notes = effective_coefficients(ce, Rounding.ROUND)
    assert num == [1.0, -0.5]
    assert den == [1.0, 0.25]
    assert any("inconsistent" in n for n in notes)


# --- directory scan -------------------------------------------------------------

def test_scan_orders_by_filename(tmp_path, fig_lco_text):
    for name in ("b.out", "a.out", "c.out"):
        (tmp_path / name).write_text(fig_lco_text)
    result = scan_directory(tmp_path)
    assert [c.ce_id for c in result.parsed] == ["a", "b", "c"]
    assert not result.failures


def test_scan_isolates_bad_files(tmp_path, fig_lco_text):
    (tmp_path / "good1.out").write_text(fig_lco_text)
    (tmp_path / "bad.out").write_text("complete garbage\n")
    (tmp_path / "good2.out").write_text(fig_lco_text)
    result = scan_directory(tmp_path)
    assert len(result.parsed) == 2
    assert len(result.failures) == 1
    assert "bad.out" in result.failures[0][0]


def test_scan_empty_directory_warns(tmp_path):
    result = scan_directory(tmp_path)
    assert result.parsed == []
    assert result.warnings


def test_scan_missing_directory(tmp_path):
    with pytest.raises(NotADirectoryError):
        scan_directory(tmp_path / "nope")


# --- JSON results ----------------------------------------------------------------

def _outcome(ce, status="reproducible"):
    return ValidationOutcome(
        counterexample_id=ce.ce_id, status=status,
        simulated_outputs=ce.claimed_outputs, cpu_time=0.0123,
        lco_period=2, lco_amplitude=1.0,
    )


def test_write_results_groups_and_roundtrip(tmp_path, fig_lco_text):
    ce = parse_counterexample(fig_lco_text, "fig1.out")
    out = write_results([_outcome(ce)], [ce], tmp_path / "report")
    assert out.name == "report.json"
    records = load_results(out)
    assert len(records) == 1
    rec = records[0]
    assert rec["schema"] == "cxval-1"
    for group in ("counterexample", "digital_system", "inputs",
                  "implementation", "outputs"):
        assert group in rec
    # numeric fields survive bit-exactly
    assert tuple(rec["digital_system"]["numerator"]) == ce.system.numerator
    assert tuple(rec["outputs"]["verifier_outputs"]) == ce.claimed_outputs
    assert rec["outputs"]["cpu_time"] == 0.0123
    assert rec["implementation"]["int_bits"] == 13


def test_write_results_empty(tmp_path):
    out = write_results([], [], tmp_path / "empty.json")
    assert json.loads(out.read_text()) == []


def test_write_results_parallel_check(tmp_path, fig_lco_text):
    ce = parse_counterexample(fig_lco_text)
    with pytest.raises(ValueError):
        write_results([], [ce], tmp_path / "x.json")


def test_record_rebuilds_counterexample(fig_overflow_text):
    ce = parse_counterexample(fig_overflow_text, "fig8.out")
    rec = result_record(_outcome(ce), ce, "wrap", "round")
    rebuilt, rounding, overflow_mode = counterexample_from_record(rec)
    assert rebuilt.system == ce.system
    assert rebuilt.impl == ce.impl
    assert rebuilt.inputs == ce.inputs
    assert rebuilt.claimed_outputs == ce.claimed_outputs
    assert rounding is Rounding.ROUND
    assert overflow_mode == "wrap"
