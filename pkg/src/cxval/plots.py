"""Plot data behind the graphical views: overflow traces, limit-cycle traces,
and pole-zero maps with and without finite-word-length effects.

Each builder returns a PlotSeries of named (x, y) point lists plus
annotations.  Writers emit a delimited CSV (`series,x,y`), a JSON mirror of
the PlotSeries fields, and a rendered PNG figure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
import json

from .counterexamples import Counterexample, DigitalSystem
from .fixed_point import FixedPointFormat, Rounding, range_of
from .polynomials import Polynomial, roots_of
from .realizations import SimulationTrace
from .validators import (
    RealizationKind,
    RootEvidence,
    check_minimum_phase,
    check_stability,
    extract_oscillation,
    overflow_event_steps,
)

Point = tuple[float, float]


@dataclass
class PlotSeries:
    kind: str  # "overflow_trace" | "lco_trace" | "pole_zero_map"
    series: dict[str, list[Point]] = field(default_factory=dict)
    annotations: dict = field(default_factory=dict)


def overflow_series(ce: Counterexample, trace: SimulationTrace) -> PlotSeries:
    """Raw output per step with the representable limits and overflow markers."""
    lo, hi = range_of(ce.impl.fmt)
    steps = len(trace.outputs_raw)
    events = overflow_event_steps(trace, ce.impl.fmt)
    marker_steps = sorted({e.step for e in events})
    last = max(steps - 1, 0)
    return PlotSeries(
        kind="overflow_trace",
        series={
            "output": [(float(n), v) for n, v in enumerate(trace.outputs_raw)],
            "min_limit": [(0.0, float(lo)), (float(last), float(lo))],
            "max_limit": [(0.0, float(hi)), (float(last), float(hi))],
            "overflow": [(float(n), trace.outputs_raw[n]) for n in marker_steps],
        },
        annotations={
            "min_value": float(lo),
            "max_value": float(hi),
            "overflow_steps": marker_steps,
            "format": str(ce.impl.fmt),
        },
    )


def lco_series(ce: Counterexample, trace: SimulationTrace) -> PlotSeries:
    """Post-handling output per step with the detected oscillation, if any."""
    outputs = trace.output_values
    osc = extract_oscillation(outputs)
    annotations: dict = {"input": ce.inputs[0] if ce.inputs else None}
    if osc is not None and osc[1] > 0:
        annotations["period"] = osc[0]
        annotations["amplitude"] = osc[1]
    return PlotSeries(
        kind="lco_trace",
        series={"output": [(float(n), v) for n, v in enumerate(outputs)]},
        annotations=annotations,
    )


def _points(roots) -> list[Point]:
    return [(r.real, r.imag) for r in roots]


def pole_zero_series(system: DigitalSystem, fmt: FixedPointFormat,
                     rounding: Rounding = Rounding.ROUND,
                     realization: RealizationKind = RealizationKind.DFI,
                     delta: float | None = None) -> PlotSeries:
    """Poles and zeros, ideal and under FWL effects, plus the unit circle.

    The FWL point sets are exactly the roots the stability and minimum-phase
    checks decide on (same call), so map and verdict cannot disagree.
    """
    a0 = system.denominator[0]
    ideal_poles = roots_of(Polynomial.from_coeffs([c / a0 for c in system.denominator]))
    ideal_zeros = roots_of(Polynomial.from_coeffs([c / a0 for c in system.numerator]))
    stab = check_stability(system, fmt, rounding, realization, delta)
    minp = check_minimum_phase(system, fmt, rounding, realization, delta)
    assert isinstance(stab.evidence, RootEvidence)
    assert isinstance(minp.evidence, RootEvidence)
    return PlotSeries(
        kind="pole_zero_map",
        series={
            "poles_ideal": _points(ideal_poles.roots),
            "zeros_ideal": _points(ideal_zeros.roots),
            "poles_fwl": _points(stab.evidence.roots),
            "zeros_fwl": _points(minp.evidence.roots),
        },
        annotations={
            "unit_circle": True,
            "stable": not stab.violated,
            "minimum_phase": not minp.violated,
            "max_pole_modulus": stab.evidence.max_modulus,
            "max_zero_modulus": minp.evidence.max_modulus,
            "format": str(fmt),
        },
    )


def write_series_csv(plot: PlotSeries, path: str | Path) -> Path:
    path = Path(path)
    lines = ["series,x,y"]
    for name, points in plot.series.items():
        for x, y in points:
            lines.append(f"{name},{x!r},{y!r}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_series_json(plot: PlotSeries, path: str | Path) -> Path:
    path = Path(path)
    doc = {
        "kind": plot.kind,
        "series": {name: [[x, y] for x, y in pts] for name, pts in plot.series.items()},
        "annotations": plot.annotations,
    }
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return path


def render_png(plot: PlotSeries, path: str | Path) -> Path:
    """Render the series to a figure file (headless backend)."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import numpy as np

    path = Path(path)
    fig, ax = plt.subplots(figsize=(7, 5))
    if plot.kind == "pole_zero_map":
        theta = np.linspace(0, 2 * np.pi, 256)
        ax.plot(np.cos(theta), np.sin(theta), "k--", linewidth=0.8, label="unit circle")
        styles = {
            "poles_ideal": dict(marker="x", color="tab:blue", label="poles (ideal)"),
            "zeros_ideal": dict(marker="o", color="tab:blue", mfc="none", label="zeros (ideal)"),
            "poles_fwl": dict(marker="x", color="tab:red", label="poles (FWL)"),
            "zeros_fwl": dict(marker="o", color="tab:red", mfc="none", label="zeros (FWL)"),
        }
        for name, style in styles.items():
            pts = plot.series.get(name, [])
            if pts:
                xs, ys = zip(*pts)
                ax.plot(xs, ys, linestyle="none", **style)
        ax.set_xlabel("Re(z)")
        ax.set_ylabel("Im(z)")
        ax.set_aspect("equal")
        ax.set_title(f"Poles and zeros, format {plot.annotations.get('format', '')}")
    else:
        xs, ys = zip(*plot.series["output"]) if plot.series.get("output") else ((), ())
        ax.step(xs, ys, where="post", label="output")
        ax.plot(xs, ys, ".", color="tab:blue")
        if plot.kind == "overflow_trace":
            ax.axhline(plot.annotations["min_value"], color="tab:red", linestyle="--",
                       linewidth=0.9, label="range limits")
            ax.axhline(plot.annotations["max_value"], color="tab:red", linestyle="--",
                       linewidth=0.9)
            marks = plot.series.get("overflow", [])
            if marks:
                mx, my = zip(*marks)
                ax.plot(mx, my, "rv", markersize=9, label="overflow")
            ax.set_title(f"Overflow detection, format {plot.annotations.get('format', '')}")
        else:
            title = "Output oscillation"
            if "period" in plot.annotations:
                title += (f" (period {plot.annotations['period']}, amplitude "
                          f"{plot.annotations['amplitude']:g})")
            ax.set_title(title)
        ax.set_xlabel("step")
        ax.set_ylabel("output")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_plot(plot: PlotSeries, base: str | Path) -> list[Path]:
    """Emit the CSV, JSON, and PNG renderings side by side."""
    base = Path(base)
    return [
        write_series_csv(plot, base.with_suffix(".csv")),
        write_series_json(plot, base.with_suffix(".json")),
        render_png(plot, base.with_suffix(".png")),
    ]
