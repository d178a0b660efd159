"""Experiment configuration files.

Experiments are described in TOML with sections [array], [noise],
[[sources]], [mismatch], [run] and one [mechanism.<name>] block per
step-size rule.  Source powers are written in dB relative to the SOI and
converted to linear variances here.  Unknown keys are rejected, and
validation failures point back at the offending line of the file.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .array_model import ArrayGeometry, ScenarioConfig, SourceSpec
from .stepsize import (
    AssParams,
    FssParams,
    MassParams,
    MechanismParams,
    StepSizeBounds,
    TaassParams,
)

__all__ = [
    "ConfigError",
    "MechanismSpec",
    "OutputOptions",
    "ExperimentSpec",
    "parse_config",
]


class ConfigError(ValueError):
    """Malformed or invalid experiment configuration."""


@dataclass(frozen=True)
class MechanismSpec:
    kind: str
    params: MechanismParams


@dataclass(frozen=True)
class OutputOptions:
    """Runtime output choices; filled in by the CLI, not by config files."""

    csv_path: str | None = None
    counters: bool = False
    bound_report: bool = False
    workers: int = 1


@dataclass(frozen=True)
class ExperimentSpec:
    scenario_id: str
    scenario: ScenarioConfig
    mechanisms: tuple[MechanismSpec, ...]
    outputs: OutputOptions = field(default_factory=OutputOptions)

    def __post_init__(self) -> None:
        if not self.mechanisms:
            raise ValueError("experiment needs at least one step-size mechanism")


class _Locator:
    """Best-effort mapping from config paths back to line numbers."""

    def __init__(self, text: str) -> None:
        self.lines = text.splitlines()

    def section(self, name: str, occurrence: int = 0) -> int | None:
        pattern = re.compile(r"^\s*\[+\s*" + re.escape(name) + r"\s*\]+")
        seen = 0
        for number, line in enumerate(self.lines, start=1):
            if pattern.match(line):
                if seen == occurrence:
                    return number
                seen += 1
        return None

    def key(self, section: str | None, key: str, occurrence: int = 0) -> int | None:
        start = 1
        if section is not None:
            header = self.section(section, occurrence)
            if header is None:
                return None
            start = header + 1
        pattern = re.compile(r"^\s*" + re.escape(key) + r"\s*=")
        for number, line in enumerate(self.lines[start - 1 :], start=start):
            if pattern.match(line):
                return number
        return None


def _fail(where: int | None, message: str) -> ConfigError:
    if where is not None:
        return ConfigError(f"line {where}: {message}")
    return ConfigError(message)


def _reject_unknown(table: dict, allowed: set[str], context: str, line: int | None, loc: _Locator, section: str | None = None, occurrence: int = 0):
    for key in table:
        if key not in allowed:
            if section is not None:
                where = loc.key(section, key, occurrence)
            else:
                where = loc.key(None, key) or line
            raise _fail(where, f"unknown key {key!r} in {context}")


def _number(table: dict, key: str, context: str, loc: _Locator, section: str | None, occurrence: int = 0, required: bool = True, default=None):
    if key not in table:
        if required:
            raise _fail(loc.section(section, occurrence) if section else None,
                        f"{context} is missing required key {key!r}")
        return default
    value = table[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _fail(loc.key(section, key, occurrence),
                    f"{context}.{key} must be a number, got {value!r}")
    return float(value)


def _integer(table: dict, key: str, context: str, loc: _Locator, section: str | None, occurrence: int = 0, required: bool = True, default=None):
    if key not in table:
        if required:
            raise _fail(loc.section(section, occurrence) if section else None,
                        f"{context} is missing required key {key!r}")
        return default
    value = table[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise _fail(loc.key(section, key, occurrence),
                    f"{context}.{key} must be an integer, got {value!r}")
    return value


def _parse_sources(raw: list, soi_power: float, loc: _Locator) -> tuple[SourceSpec, ...]:
    sources = []
    for k, entry in enumerate(raw):
        context = f"[[sources]] entry {k}"
        if not isinstance(entry, dict):
            raise _fail(loc.section("sources", k), f"{context} must be a table")
        _reject_unknown(
            entry,
            {"doa_deg", "power_db_rel_soi", "active_from", "active_until", "allow_endfire"},
            context, loc.section("sources", k), loc, "sources", k,
        )
        doa = _number(entry, "doa_deg", context, loc, "sources", k)
        rel_db = _number(entry, "power_db_rel_soi", context, loc, "sources", k)
        if k == 0 and rel_db != 0.0:
            raise _fail(loc.key("sources", "power_db_rel_soi", 0),
                        "the first source is the SOI and defines the 0 dB reference; "
                        f"its power_db_rel_soi must be 0, got {rel_db}")
        active_from = _integer(entry, "active_from", context, loc, "sources", k,
                               required=False, default=1)
        active_until = _integer(entry, "active_until", context, loc, "sources", k,
                                required=False, default=None)
        allow_endfire = entry.get("allow_endfire", False)
        if not isinstance(allow_endfire, bool):
            raise _fail(loc.key("sources", "allow_endfire", k),
                        f"{context}.allow_endfire must be a boolean")
        try:
            sources.append(
                SourceSpec(
                    doa_deg=doa,
                    power=soi_power * 10.0 ** (rel_db / 10.0),
                    active_from=active_from,
                    active_until=active_until,
                    allow_endfire=allow_endfire,
                )
            )
        except ValueError as exc:
            raise _fail(loc.section("sources", k), f"{context}: {exc}") from exc
    return tuple(sources)


def _bounds(table: dict, context: str, loc: _Locator, section: str) -> StepSizeBounds:
    mu_min = _number(table, "mu_min", context, loc, section)
    mu_max = _number(table, "mu_max", context, loc, section)
    try:
        return StepSizeBounds(mu_min=mu_min, mu_max=mu_max)
    except ValueError as exc:
        raise _fail(loc.key(section, "mu_min"), f"{context}: {exc}") from exc


def _parse_mechanisms(raw: dict, loc: _Locator) -> tuple[MechanismSpec, ...]:
    specs = []
    for kind, table in raw.items():
        section = f"mechanism.{kind}"
        context = f"[{section}]"
        if not isinstance(table, dict):
            raise _fail(loc.key("mechanism", kind), f"{context} must be a table")
        try:
            if kind == "fss":
                _reject_unknown(table, {"mu"}, context, None, loc, section)
                params: MechanismParams = FssParams(mu=_number(table, "mu", context, loc, section))
            elif kind == "mass":
                _reject_unknown(table, {"alpha", "gamma", "mu0", "mu_min", "mu_max"},
                                context, None, loc, section)
                params = MassParams(
                    alpha=_number(table, "alpha", context, loc, section),
                    gamma=_number(table, "gamma", context, loc, section),
                    bounds=_bounds(table, context, loc, section),
                    mu0=_number(table, "mu0", context, loc, section),
                )
            elif kind == "taass":
                _reject_unknown(table, {"alpha", "gamma", "beta", "mu0", "mu_min", "mu_max", "v0"},
                                context, None, loc, section)
                params = TaassParams(
                    alpha=_number(table, "alpha", context, loc, section),
                    gamma=_number(table, "gamma", context, loc, section),
                    beta=_number(table, "beta", context, loc, section),
                    bounds=_bounds(table, context, loc, section),
                    mu0=_number(table, "mu0", context, loc, section),
                    v0=_number(table, "v0", context, loc, section, required=False, default=0.0),
                )
            elif kind == "ass":
                _reject_unknown(table, {"rho", "mu0", "mu_min", "mu_max"},
                                context, None, loc, section)
                params = AssParams(
                    rho=_number(table, "rho", context, loc, section),
                    bounds=_bounds(table, context, loc, section),
                    mu0=_number(table, "mu0", context, loc, section),
                )
            else:
                raise _fail(loc.section(section),
                            f"unknown mechanism {kind!r}; known: fss, ass, mass, taass")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise _fail(loc.section(section), f"{context}: {exc}") from exc
        specs.append(MechanismSpec(kind=kind, params=params))
    return tuple(specs)


def parse_config(text: str) -> ExperimentSpec:
    """Parse and validate a complete experiment description."""
    loc = _Locator(text)
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config is not valid TOML: {exc}") from exc

    _reject_unknown(
        raw,
        {"id", "soi_power", "array", "noise", "sources", "mismatch", "run", "mechanism"},
        "the top level", None, loc, None,
    )
    for key in ("id", "array", "noise", "sources", "run"):
        if key not in raw:
            raise ConfigError(f"config is missing required {key!r}")
    if not isinstance(raw["id"], str) or not raw["id"]:
        raise _fail(loc.key(None, "id"), "id must be a non-empty string")

    soi_power = _number(raw, "soi_power", "the top level", loc, None,
                        required=False, default=1.0)
    if not soi_power > 0:
        raise _fail(loc.key(None, "soi_power"), f"soi_power must be positive, got {soi_power}")

    array = raw["array"]
    _reject_unknown(array, {"sensors", "spacing_over_wavelength"}, "[array]",
                    loc.section("array"), loc, "array")
    try:
        geometry = ArrayGeometry(
            m=_integer(array, "sensors", "[array]", loc, "array"),
            spacing_over_wavelength=_number(
                array, "spacing_over_wavelength", "[array]", loc, "array",
                required=False, default=0.5,
            ),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise _fail(loc.section("array"), f"[array]: {exc}") from exc

    noise = raw["noise"]
    _reject_unknown(noise, {"power"}, "[noise]", loc.section("noise"), loc, "noise")
    noise_power = _number(noise, "power", "[noise]", loc, "noise")

    if not isinstance(raw["sources"], list) or not raw["sources"]:
        raise ConfigError("config needs at least one [[sources]] entry (the SOI)")
    sources = _parse_sources(raw["sources"], soi_power, loc)

    offset = 0.0
    if "mismatch" in raw:
        mismatch = raw["mismatch"]
        _reject_unknown(mismatch, {"presumed_doa_offset_deg"}, "[mismatch]",
                        loc.section("mismatch"), loc, "mismatch")
        offset = _number(mismatch, "presumed_doa_offset_deg", "[mismatch]",
                         loc, "mismatch", required=False, default=0.0)

    run = raw["run"]
    _reject_unknown(run, {"snapshots", "runs", "master_seed"}, "[run]",
                    loc.section("run"), loc, "run")
    snapshots = _integer(run, "snapshots", "[run]", loc, "run")
    runs = _integer(run, "runs", "[run]", loc, "run")
    master_seed = _integer(run, "master_seed", "[run]", loc, "run")
    if not 0 <= master_seed < 2**64:
        raise _fail(loc.key("run", "master_seed"),
                    f"master_seed must be an unsigned 64-bit integer, got {master_seed}")

    try:
        scenario = ScenarioConfig(
            geometry=geometry,
            sources=sources,
            noise_power=noise_power,
            presumed_doa_offset_deg=offset,
            snapshots=snapshots,
            runs=runs,
            master_seed=master_seed,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    mechanisms_raw = raw.get("mechanism", {})
    if not isinstance(mechanisms_raw, dict) or not mechanisms_raw:
        raise ConfigError("config needs at least one [mechanism.<name>] block")
    mechanisms = _parse_mechanisms(mechanisms_raw, loc)

    return ExperimentSpec(scenario_id=raw["id"], scenario=scenario, mechanisms=mechanisms)
