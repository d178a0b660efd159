"""Bundled scenario presets (shipped as TOML config files)."""

from __future__ import annotations

from importlib import resources

from .config import ExperimentSpec, parse_config

__all__ = ["list_presets", "preset_text", "load_preset"]


def _root():
    return resources.files(__package__) / "presets"


def list_presets() -> list[str]:
    return sorted(
        entry.name.removesuffix(".toml")
        for entry in _root().iterdir()
        if entry.name.endswith(".toml")
    )


def preset_text(name: str) -> str:
    """The raw TOML of a bundled preset."""
    entry = _root() / f"{name}.toml"
    if not entry.is_file():
        raise KeyError(f"no preset named {name!r}; available: {', '.join(list_presets())}")
    return entry.read_text(encoding="utf-8")


def load_preset(name: str) -> ExperimentSpec:
    return parse_config(preset_text(name))
