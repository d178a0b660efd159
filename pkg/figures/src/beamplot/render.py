"""CSV loading and figure construction.

The input format is the benchmark harness CSV, recognized by its exact
header.  The renderer is a pure file-to-file transformation: rows are
plotted in file order, values exactly as parsed, and any malformed input
fails loudly before an image is written.
"""

from __future__ import annotations

import csv
import pathlib
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .spec import FigureSpec  # noqa: E402

__all__ = ["RenderError", "TraceSeries", "EXPECTED_HEADER", "load_series", "build_figure", "render"]

EXPECTED_HEADER = [
    "scenario_id",
    "mechanism",
    "snapshot",
    "sinr_db_mean",
    "sinr_linear_mean",
    "mu_mean",
]


class RenderError(ValueError):
    """Malformed input data or an empty selection."""


@dataclass
class TraceSeries:
    scenario: str
    mechanism: str
    snapshots: list[int]
    sinr_db: list[float]
    mu: list[float]


def load_series(paths, scenarios) -> list[TraceSeries]:
    """Read the harness CSVs and group rows into per-mechanism series.

    Row order is preserved exactly; nothing is sorted or resampled.
    """
    series: dict[tuple[str, str], TraceSeries] = {}
    seen_scenarios = set()
    wanted = set(scenarios)
    for path in paths:
        path = pathlib.Path(path)
        try:
            handle = open(path, "r", encoding="utf-8", newline="")
        except OSError as exc:
            raise RenderError(f"cannot read {path}: {exc}") from exc
        with handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if header != EXPECTED_HEADER:
                raise RenderError(
                    f"{path} does not carry the benchmark CSV header; "
                    f"got {header!r}"
                )
            for number, row in enumerate(reader, start=2):
                if len(row) != len(EXPECTED_HEADER):
                    raise RenderError(f"{path}:{number}: expected 6 columns, got {len(row)}")
                scenario, mechanism = row[0], row[1]
                seen_scenarios.add(scenario)
                if scenario not in wanted:
                    continue
                try:
                    snapshot = int(row[2])
                    sinr_db = float(row[3])
                    mu = float(row[5])
                except ValueError as exc:
                    raise RenderError(f"{path}:{number}: non-numeric value ({exc})") from exc
                key = (scenario, mechanism)
                if key not in series:
                    series[key] = TraceSeries(scenario, mechanism, [], [], [])
                entry = series[key]
                entry.snapshots.append(snapshot)
                entry.sinr_db.append(sinr_db)
                entry.mu.append(mu)

    missing = wanted - seen_scenarios
    if missing:
        raise RenderError(
            f"scenario id(s) {sorted(missing)} not present in the inputs "
            f"(found: {sorted(seen_scenarios)})"
        )
    if not series:
        raise RenderError("selection is empty: no rows matched the requested scenarios")
    return list(series.values())


def build_figure(spec: FigureSpec):
    """Assemble the matplotlib figure; data goes in exactly as loaded."""
    series = load_series(spec.inputs, spec.scenarios)
    multi = len(spec.scenarios) > 1

    if spec.mu_panel:
        fig, (ax, ax_mu) = plt.subplots(
            2, 1, sharex=True, figsize=(7.0, 7.0), height_ratios=[2, 1]
        )
    else:
        fig, ax = plt.subplots(figsize=(7.0, 4.5))
        ax_mu = None

    for entry in series:
        style = spec.style_for(entry.mechanism)
        label = f"{entry.scenario}:{style.label}" if multi else style.label
        ax.plot(
            entry.snapshots,
            entry.sinr_db,
            label=label,
            color=style.color,
            linestyle=style.linestyle,
            linewidth=1.2,
        )
        if ax_mu is not None:
            ax_mu.plot(
                entry.snapshots,
                entry.mu,
                label=label,
                color=style.color,
                linestyle=style.linestyle,
                linewidth=1.2,
            )

    for axis in filter(None, (ax, ax_mu)):
        for snapshot in spec.markers:
            axis.axvline(snapshot, color="#555555", linestyle=":", linewidth=1.0)
        axis.grid(True, alpha=0.3)

    ax.set_ylabel("output SINR (dB)")
    ax.legend(loc="lower right")
    if spec.title:
        ax.set_title(spec.title)
    if spec.x_range:
        ax.set_xlim(*spec.x_range)
    if spec.y_range:
        ax.set_ylim(*spec.y_range)
    if ax_mu is not None:
        ax_mu.set_ylabel("mean step size")
        ax_mu.set_yscale("log")
        ax_mu.set_xlabel("snapshots")
    else:
        ax.set_xlabel("snapshots")
    fig.tight_layout()
    return fig


def render(spec: FigureSpec) -> pathlib.Path:
    """Build and write the figure; returns the output path."""
    fig = build_figure(spec)
    spec.output.parent.mkdir(parents=True, exist_ok=True)
    try:
        fig.savefig(spec.output, dpi=150)
    finally:
        plt.close(fig)
    return spec.output
