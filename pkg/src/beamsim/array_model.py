"""Narrowband snapshot synthesis for a uniform linear array.

The received data follows the standard narrowband model

    x(i) = A s(i) + n(i),    i = 1..N

where the columns of A are steering vectors of BPSK point sources with
scheduled activity windows, and n(i) is circularly symmetric white complex
Gaussian sensor noise.  Directions of arrival are measured from the array
axis, so the inter-element phase shift is proportional to cos(theta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ArrayGeometry",
    "SourceSpec",
    "ScenarioConfig",
    "SnapshotBatch",
    "steering_vector",
    "active_sources",
    "synthesize_snapshots",
    "run_stream",
]


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear array of ``m`` sensors, spacing given as d/lambda."""

    m: int
    spacing_over_wavelength: float = 0.5

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f"sensor count must be >= 1, got {self.m}")
        if not self.spacing_over_wavelength > 0:
            raise ValueError(
                f"spacing_over_wavelength must be positive, got {self.spacing_over_wavelength}"
            )


@dataclass(frozen=True)
class SourceSpec:
    """One narrowband BPSK source.

    Parameters
    ----------
    doa_deg : float
        Direction of arrival in degrees from the array axis, in (0, 180).
        The exact endfire angles 0 and 180 are degenerate (all steering
        phases collapse) and are only accepted with ``allow_endfire``.
    power : float
        Linear symbol variance sigma^2; the emitted symbols are
        +/- sqrt(power) with equal probability.
    active_from, active_until : int
        1-based snapshot window [active_from, active_until) during which
        the source transmits.  ``active_until=None`` means it never leaves.
    """

    doa_deg: float
    power: float
    active_from: int = 1
    active_until: int | None = None
    allow_endfire: bool = False

    def __post_init__(self) -> None:
        if not self.power > 0:
            raise ValueError(f"source power must be positive, got {self.power}")
        lo, hi = (0.0, 180.0)
        inside = (lo < self.doa_deg < hi) or (
            self.allow_endfire and self.doa_deg in (lo, hi)
        )
        if not inside:
            raise ValueError(
                f"doa_deg must lie in (0, 180), got {self.doa_deg}"
                " (endfire 0/180 requires allow_endfire)"
            )
        if self.active_from < 1:
            raise ValueError(f"active_from must be >= 1, got {self.active_from}")
        if self.active_until is not None and not self.active_from < self.active_until:
            raise ValueError(
                f"activity window is empty: [{self.active_from}, {self.active_until})"
            )

    def active_at(self, i: int) -> bool:
        until = math.inf if self.active_until is None else self.active_until
        return self.active_from <= i < until


@dataclass(frozen=True)
class ScenarioConfig:
    """Complete description of one simulated environment.

    ``sources[0]`` is the signal of interest (SOI).  The beamformer is
    steered toward ``sources[0].doa_deg + presumed_doa_offset_deg``; data
    generation always uses the true DOAs, so a nonzero offset models look
    direction mismatch only.
    """

    geometry: ArrayGeometry
    sources: tuple[SourceSpec, ...]
    noise_power: float
    presumed_doa_offset_deg: float = 0.0
    snapshots: int = 1000
    runs: int = 1
    master_seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "sources", tuple(self.sources))
        if len(self.sources) == 0:
            raise ValueError("scenario needs at least one source (the SOI)")
        if self.noise_power < 0:
            raise ValueError(f"noise_power must be >= 0, got {self.noise_power}")
        if self.snapshots < 1:
            raise ValueError(f"snapshots must be >= 1, got {self.snapshots}")
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")

    @property
    def soi(self) -> SourceSpec:
        return self.sources[0]

    @property
    def presumed_doa_deg(self) -> float:
        """Look direction handed to the beamformer (true SOI DOA + mismatch)."""
        return self.sources[0].doa_deg + self.presumed_doa_offset_deg


@dataclass(frozen=True)
class SnapshotBatch:
    """One run's worth of synthesized array data.

    ``x`` has shape (N, m): row i-1 is the snapshot x(i).  ``symbols`` has
    shape (N, q) and keeps the real BPSK symbols actually used (zero where a
    source is inactive) so tests can check the model algebraically.
    """

    x: np.ndarray
    symbols: np.ndarray

    def __post_init__(self) -> None:
        self.x.setflags(write=False)
        self.symbols.setflags(write=False)

    def __len__(self) -> int:
        return self.x.shape[0]


def steering_vector(
    geometry: ArrayGeometry, doa_deg: float, allow_endfire: bool = False
) -> np.ndarray:
    """Array response [1, e^{-2pi j (d/l) cos t}, ..., e^{-2pi j (m-1)(d/l) cos t}].

    Element 0 is exactly 1 and every element has unit magnitude.
    """
    if not (0.0 < doa_deg < 180.0) and not (allow_endfire and doa_deg in (0.0, 180.0)):
        raise ValueError(
            f"doa_deg must lie in (0, 180), got {doa_deg}"
            " (endfire 0/180 requires allow_endfire)"
        )
    phase = -2.0 * math.pi * geometry.spacing_over_wavelength * math.cos(
        math.radians(doa_deg)
    )
    return np.exp(1j * phase * np.arange(geometry.m))


def active_sources(config: ScenarioConfig, i: int) -> list[int]:
    """Indices of sources transmitting at snapshot ``i`` (1-based), in config order."""
    if not 1 <= i <= config.snapshots:
        raise ValueError(f"snapshot index {i} outside 1..{config.snapshots}")
    return [k for k, src in enumerate(config.sources) if src.active_at(i)]


def run_stream(master_seed: int, run_index: int) -> np.random.Generator:
    """Independent per-run RNG stream.

    Philox is counter-based, so streams derived from (master_seed, run_index)
    can be created in any order, or in parallel, with identical results.
    """
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(run_index,))
    return np.random.Generator(np.random.Philox(seq))


def synthesize_snapshots(config: ScenarioConfig, run_index: int) -> SnapshotBatch:
    """Draw one deterministic batch of N snapshots for the given run.

    Symbols are drawn first (all N x q signs in one block), then the noise,
    so the layout is reproducible bit for bit given (master_seed, run_index).
    """
    rng = run_stream(config.master_seed, run_index)
    n, m = config.snapshots, config.geometry.m
    q = len(config.sources)

    amplitudes = np.sqrt(np.array([s.power for s in config.sources]))
    signs = rng.integers(0, 2, size=(n, q)).astype(np.float64) * 2.0 - 1.0
    symbols = signs * amplitudes

    index = np.arange(1, n + 1)[:, None]
    from_ = np.array([s.active_from for s in config.sources])
    until = np.array(
        [math.inf if s.active_until is None else s.active_until for s in config.sources]
    )
    symbols = np.where((index >= from_) & (index < until), symbols, 0.0)

    noise = rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
    noise *= math.sqrt(config.noise_power / 2.0)

    manifold = np.column_stack(
        [steering_vector(config.geometry, s.doa_deg, s.allow_endfire) for s in config.sources]
    )
    x = symbols @ manifold.T + noise
    return SnapshotBatch(x=x, symbols=symbols)
