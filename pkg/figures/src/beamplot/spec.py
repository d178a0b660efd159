"""Figure descriptions: a small TOML file naming inputs, selection and style."""

from __future__ import annotations

import pathlib
from dataclasses import dataclass, field

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

__all__ = ["FigureSpecError", "LineStyle", "FigureSpec", "load_figure_spec"]

DEFAULT_STYLES = {
    "fss": ("FSS", "#7f7f7f", "-"),
    "ass": ("ASS", "#2ca02c", "-."),
    "mass": ("MASS", "#1f77b4", "--"),
    "taass": ("TAASS", "#d62728", "-"),
}


class FigureSpecError(ValueError):
    """Malformed or invalid figure spec."""


@dataclass(frozen=True)
class LineStyle:
    label: str
    color: str | None = None
    linestyle: str = "-"


@dataclass(frozen=True)
class FigureSpec:
    inputs: tuple[pathlib.Path, ...]
    scenarios: tuple[str, ...]
    output: pathlib.Path
    title: str | None = None
    x_range: tuple[float, float] | None = None
    y_range: tuple[float, float] | None = None
    markers: tuple[int, ...] = ()
    mu_panel: bool = False
    styles: dict[str, LineStyle] = field(default_factory=dict)

    def style_for(self, mechanism: str) -> LineStyle:
        if mechanism in self.styles:
            return self.styles[mechanism]
        if mechanism in DEFAULT_STYLES:
            label, color, dashes = DEFAULT_STYLES[mechanism]
            return LineStyle(label=label, color=color, linestyle=dashes)
        return LineStyle(label=mechanism)


_TOP_KEYS = {
    "inputs", "scenarios", "output", "title",
    "x_range", "y_range", "markers", "mu_panel", "styles",
}


def _string_list(raw: dict, key: str) -> list[str]:
    value = raw.get(key)
    if (
        not isinstance(value, list)
        or not value
        or not all(isinstance(v, str) and v for v in value)
    ):
        raise FigureSpecError(f"{key!r} must be a non-empty list of strings")
    return value


def _range(raw: dict, key: str) -> tuple[float, float] | None:
    if key not in raw:
        return None
    value = raw[key]
    ok = (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
        and value[0] < value[1]
    )
    if not ok:
        raise FigureSpecError(f"{key!r} must be [low, high] with low < high")
    return float(value[0]), float(value[1])


def _styles(raw: dict) -> dict[str, LineStyle]:
    styles = {}
    for mechanism, table in raw.get("styles", {}).items():
        if not isinstance(table, dict):
            raise FigureSpecError(f"[styles.{mechanism}] must be a table")
        unknown = set(table) - {"label", "color", "linestyle"}
        if unknown:
            raise FigureSpecError(
                f"unknown key {sorted(unknown)[0]!r} in [styles.{mechanism}]"
            )
        styles[mechanism] = LineStyle(
            label=str(table.get("label", mechanism)),
            color=table.get("color"),
            linestyle=str(table.get("linestyle", "-")),
        )
    return styles


def load_figure_spec(path: str | pathlib.Path) -> FigureSpec:
    """Parse a figure spec file; relative paths resolve against its folder."""
    path = pathlib.Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FigureSpecError(f"cannot read figure spec {path}: {exc}") from exc
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise FigureSpecError(f"{path} is not valid TOML: {exc}") from exc

    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise FigureSpecError(f"unknown key {sorted(unknown)[0]!r} in {path.name}")
    for key in ("inputs", "scenarios", "output"):
        if key not in raw:
            raise FigureSpecError(f"{path.name} is missing required {key!r}")
    if not isinstance(raw["output"], str) or not raw["output"]:
        raise FigureSpecError("'output' must be a non-empty path")

    markers = raw.get("markers", [])
    if not isinstance(markers, list) or not all(
        isinstance(v, int) and not isinstance(v, bool) and v >= 1 for v in markers
    ):
        raise FigureSpecError("'markers' must be a list of snapshot indices (>= 1)")
    mu_panel = raw.get("mu_panel", False)
    if not isinstance(mu_panel, bool):
        raise FigureSpecError("'mu_panel' must be a boolean")
    title = raw.get("title")
    if title is not None and not isinstance(title, str):
        raise FigureSpecError("'title' must be a string")

    base = path.parent
    return FigureSpec(
        inputs=tuple(base / p for p in _string_list(raw, "inputs")),
        scenarios=tuple(_string_list(raw, "scenarios")),
        output=base / raw["output"],
        title=title,
        x_range=_range(raw, "x_range"),
        y_range=_range(raw, "y_range"),
        markers=tuple(markers),
        mu_panel=mu_panel,
        styles=_styles(raw),
    )
