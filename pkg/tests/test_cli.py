import json
import os

import pytest

from conftest import FIG_LCO_TEXT, FIG_OVERFLOW_TEXT
from cxval.cli import main


def run_cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_fwl_transcript(capsys):
    code, out, _ = run_cli(capsys, ["fwl", "--coeffs", "1,1.8,1.14,0.272",
                                    "--frac-bits", "13", "--rounding", "floor"])
    assert code == 0
    assert out.strip() == "1.0000 1.7999 1.1399 0.2720"


def test_fwl_round_default_differs(capsys):
    code, out, _ = run_cli(capsys, ["fwl", "--coeffs", "1,1.8,1.14,0.272",
                                    "--frac-bits", "13"])
    assert code == 0
    assert out.strip() == "1.0000 1.8000 1.1400 0.2720"


def test_simulate_stability_successful(capsys):
    code, out, _ = run_cli(capsys, [
        "simulate-stability", "--num", "0.1,-0.3,0.3,-0.1",
        "--den", "1,1.8,1.14,0.272", "--frac-bits", "13"])
    assert code == 0
    assert out.strip() == "successful"


def test_simulate_minimum_phase_failed(capsys):
    code, out, _ = run_cli(capsys, [
        "simulate-minimum-phase", "--num", "0.1,-0.3,0.3,-0.1",
        "--den", "1,1.8,1.14,0.272", "--frac-bits", "13"])
    assert code == 0
    assert out.strip() == "failed"


def test_simulate_stability_delta_realization(capsys):
    code, out, _ = run_cli(capsys, [
        "simulate-stability", "--num", "1", "--den", "1,-0.5",
        "--frac-bits", "13", "--realization", "DDFI", "--delta", "0.25"])
    assert code == 0
    assert out.strip() == "successful"


def test_validate_limit_cycle_directory(tmp_path, capsys, monkeypatch):
    (tmp_path / "fig1.out").write_text(FIG_LCO_TEXT)
    monkeypatch.chdir(tmp_path)
    code, out, err = run_cli(capsys, ["validate", "--path", str(tmp_path),
                                      "--property", "lc", "--out", "ds_system"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "Running Automatic Validation..."
    assert "Total Counterexamples Reproducible: 1" in lines
    assert (tmp_path / "ds_system.json").exists()


def test_validate_overflow_pair_exit_zero(tmp_path, capsys, monkeypatch):
    import random
    import synth
    from cxval.fixed_point import Rounding, Overflow
    rng = random.Random(9)
    (tmp_path / "a_fig8.out").write_text(FIG_OVERFLOW_TEXT)
    # second overflow file synthesized reflexively with defaults (wrap, round)
    case = None
    while case is None or case.rounding is not Rounding.ROUND \
            or case.overflow is not Overflow.WRAP:
        case = synth.synth_case(rng, want_lco=False)
    (tmp_path / "b_synth.out").write_text(case.text)
    monkeypatch.chdir(tmp_path)
    code, out, _ = run_cli(capsys, ["validate", "--path", str(tmp_path),
                                    "--property", "o", "--out", "ds_overflow"])
    assert code == 0
    assert "Total Counterexamples Reproducible: 2" in out
    assert "Total Counterexamples Irreproducible: 0" in out
    assert "Total Counterexamples: 2" in out


def test_validate_empty_directory_exit_zero(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, out, err = run_cli(capsys, ["validate", "--path", str(tmp_path),
                                      "--property", "s"])
    assert code == 0
    assert "Total Counterexamples: 0" in out


def test_validate_irreproducible_exit_one(tmp_path, capsys, monkeypatch):
    broken = FIG_LCO_TEXT.replace(
        "Outputs = { 0, -1, 0, -1, 0, -1, 0, -1, 0, -1}",
        "Outputs = { 0, -0.5, 0, -0.5, 0, -0.5, 0, -0.5, 0, -0.5}")
    (tmp_path / "no.out").write_text(broken)
    monkeypatch.chdir(tmp_path)
    code, out, _ = run_cli(capsys, ["validate", "--path", str(tmp_path),
                                    "--property", "lc"])
    assert code == 1
    assert "Total Counterexamples Irreproducible: 1" in out


def test_validate_missing_directory(tmp_path, capsys):
    code, _, err = run_cli(capsys, ["validate", "--path", str(tmp_path / "nope"),
                                    "--property", "o"])
    assert code == 1
    assert "error" in err.lower()


def test_unknown_flag_usage_error(tmp_path, capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["validate", "--path", str(tmp_path), "--property", "o", "--bogus"])
    assert excinfo.value.code == 2


def test_bad_property_letter(capsys, tmp_path):
    with pytest.raises(SystemExit) as excinfo:
        main(["validate", "--path", str(tmp_path), "--property", "x"])
    assert excinfo.value.code == 2


def test_plot_subcommands_emit_files(tmp_path, capsys, monkeypatch):
    (tmp_path / "fig1.out").write_text(FIG_LCO_TEXT)
    (tmp_path / "fig8.out").write_text(FIG_OVERFLOW_TEXT)
    monkeypatch.chdir(tmp_path)
    run_cli(capsys, ["validate", "--path", str(tmp_path), "--property", "lc",
                     "--out", "lc_report"])
    run_cli(capsys, ["validate", "--path", str(tmp_path), "--property", "o",
                     "--out", "o_report"])

    code, out, _ = run_cli(capsys, ["plot-limit-cycle", "--report",
                                    "lc_report.json", "--index", "1"])
    assert code == 0
    emitted = [line for line in out.splitlines() if line]
    assert len(emitted) == 3
    for path in emitted:
        assert os.path.exists(path)

    code, out, _ = run_cli(capsys, ["plot-overflow", "--report", "o_report.json",
                                    "--out-base", "ovf"])
    assert code == 0
    assert os.path.exists("ovf.csv") and os.path.exists("ovf.png")
    doc = json.loads(open("ovf.json").read())
    assert doc["annotations"]["overflow_steps"] == [6]

    code, out, _ = run_cli(capsys, ["plot-zero-pole", "--report", "o_report.json"])
    assert code == 0
    assert any(p.endswith(".png") for p in out.splitlines())


def test_plot_wrong_kind_rejected(tmp_path, capsys, monkeypatch):
    (tmp_path / "fig1.out").write_text(FIG_LCO_TEXT)
    monkeypatch.chdir(tmp_path)
    run_cli(capsys, ["validate", "--path", str(tmp_path), "--property", "lc",
                     "--out", "rep"])
    code, _, err = run_cli(capsys, ["plot-overflow", "--report", "rep.json"])
    assert code == 1
    assert "overflow" in err


def test_plot_index_out_of_range(tmp_path, capsys, monkeypatch):
    (tmp_path / "fig1.out").write_text(FIG_LCO_TEXT)
    monkeypatch.chdir(tmp_path)
    run_cli(capsys, ["validate", "--path", str(tmp_path), "--property", "lc",
                     "--out", "rep"])
    code, _, err = run_cli(capsys, ["plot-limit-cycle", "--report", "rep.json",
                                    "--index", "5"])
    assert code == 1
    assert "index" in err


def test_cli_matches_library(tmp_path, capsys, monkeypatch):
    # the CLI is a thin shell over validate_all: identical counts
    from cxval.counterexamples import PropertyKind
    from cxval.pipeline import RunConfig, validate_all
    (tmp_path / "fig1.out").write_text(FIG_LCO_TEXT)
    monkeypatch.chdir(tmp_path)
    report = validate_all(RunConfig(path=str(tmp_path),
                                    property=PropertyKind.LIMIT_CYCLE,
                                    out_filename=str(tmp_path / "lib_report")))
    code, out, _ = run_cli(capsys, ["validate", "--path", str(tmp_path),
                                    "--property", "lc", "--out", "cli_report"])
    assert code == 0
    assert f"Total Counterexamples Reproducible: {report.reproducible}" in out
