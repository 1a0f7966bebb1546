"""Replay and validate verifier counterexamples for fixed-point digital systems."""

from .fixed_point import (
    FixedPointFormat,
    FxNum,
    Overflow,
    Rounding,
    fwl,
    fwl_values,
    fx_add,
    fx_div,
    fx_mul,
    fx_sub,
    quantize,
    quantize_flagged,
    range_of,
)
from .polynomials import (
    Polynomial,
    RootSet,
    delta_transform,
    max_root_modulus,
    roots_of,
)
from .counterexamples import (
    Counterexample,
    DigitalSystem,
    ImplementationSpec,
    ParseError,
    PropertyKind,
    RealizationKind,
    StructuralError,
    ValidationOutcome,
    counterexample_to_out,
    load_results,
    parse_counterexample,
    scan_directory,
    write_results,
)
from .realizations import (
    OverflowEvent,
    SimulationConfig,
    SimulationTrace,
    simulate,
    state_dimension,
)
from .validators import (
    BauerResult,
    LcoEvidence,
    OverflowEvidence,
    PropertyVerdict,
    RootEvidence,
    bauer_lco_free,
    check_limit_cycle,
    check_minimum_phase,
    check_overflow,
    check_stability,
    extract_oscillation,
)
from .pipeline import (
    Comparison,
    RunConfig,
    RunReport,
    compare_outcome,
    render_report,
    validate_all,
)

__version__ = "0.1.0"
