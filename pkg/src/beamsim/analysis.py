"""Output-SINR accounting, the MVDR optimum oracle, and step-size diagnostics.

SINR is always measured against the *true* interference-plus-noise
covariance of the known scenario, with the true SOI steering vector in the
numerator, so look-direction mismatch shows up as genuine delivered-quality
loss.  Cross-run averaging happens in the linear power domain; dB values
are derived afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .array_model import ScenarioConfig, SnapshotBatch, active_sources, steering_vector
from .ccm import blocking_projector

__all__ = [
    "CovarianceEstimate",
    "SinrValue",
    "SinrTrace",
    "StepBoundReport",
    "interference_noise_covariance",
    "output_sinr",
    "sinr_profile",
    "mvdr_optimal_sinr",
    "estimate_R_ccm",
    "step_size_bound",
    "convergence_time",
    "steady_window",
    "to_db",
]


def to_db(linear: float) -> float:
    """10 log10 with an explicit -inf indicator for zero power."""
    if linear <= 0.0:
        return -math.inf
    return 10.0 * math.log10(linear)


class SinrValue(tuple):
    """(linear, db) pair; db is -inf when the linear value underflows to 0."""

    __slots__ = ()

    def __new__(cls, linear: float):
        return super().__new__(cls, (float(linear), to_db(linear)))

    @property
    def linear(self) -> float:
        return self[0]

    @property
    def db(self) -> float:
        return self[1]


@dataclass
class CovarianceEstimate:
    """m x m covariance-type matrix; sample_count 0 marks an analytic result."""

    matrix: np.ndarray
    sample_count: int


@dataclass(frozen=True)
class SinrTrace:
    """Per-snapshot Monte-Carlo means for one mechanism on one scenario.

    ``runs`` counts the trials that actually entered the average; diverged
    trials are excluded and tallied separately.  The QA extremes
    (largest constraint violation, smallest/largest step size seen across
    every update of every run) ride along for the acceptance checks.
    """

    scenario_id: str
    mechanism: str
    sinr_linear: np.ndarray
    mu: np.ndarray
    runs: int
    diverged: int = 0
    max_constraint_violation: float = 0.0
    mu_low_seen: float = math.nan
    mu_high_seen: float = math.nan

    def __post_init__(self) -> None:
        if self.sinr_linear.shape != self.mu.shape:
            raise ValueError("sinr and mu traces must have equal length")
        if np.any(self.sinr_linear < 0):
            raise ValueError("linear SINR cannot be negative")

    def __len__(self) -> int:
        return self.sinr_linear.shape[0]

    @property
    def sinr_db(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 10.0 * np.log10(self.sinr_linear)


@dataclass(frozen=True)
class StepBoundReport:
    """Empirical stable-step diagnostic 2 / |lambda_max(R_vx)|."""

    lambda_max: float
    bound: float
    observed_mean_mu: float = math.nan
    converged: bool = True
    iterations: int = 0


def interference_noise_covariance(config: ScenarioConfig, i: int) -> CovarianceEstimate:
    """Analytic R_in(i) = sum_{k!=0 active} sigma_k^2 a_k a_k^H + sigma_n^2 I."""
    m = config.geometry.m
    r = np.eye(m, dtype=np.complex128) * config.noise_power
    for k in active_sources(config, i):
        if k == 0:
            continue
        src = config.sources[k]
        a = steering_vector(config.geometry, src.doa_deg, src.allow_endfire)
        r += src.power * np.outer(a, a.conj())
    return CovarianceEstimate(matrix=r, sample_count=0)


def output_sinr(w: np.ndarray, config: ScenarioConfig, i: int) -> SinrValue:
    """sigma_0^2 |w^H a_true|^2 / (w^H R_in(i) w) for a single weight vector."""
    w = np.asarray(w, dtype=np.complex128)
    if not np.any(w):
        raise ValueError("weight vector must be nonzero")
    a_true = steering_vector(config.geometry, config.soi.doa_deg, config.soi.allow_endfire)
    r_in = interference_noise_covariance(config, i).matrix
    signal = config.soi.power * abs(np.vdot(w, a_true)) ** 2
    residual = np.vdot(w, r_in @ w).real
    if signal == 0.0:
        return SinrValue(0.0)
    if residual <= 0.0:
        return SinrValue(math.inf)
    return SinrValue(signal / residual)


def _activity_segments(config: ScenarioConfig) -> list[tuple[int, int]]:
    """Half-open 1-based snapshot ranges over which R_in is constant."""
    edges = {1, config.snapshots + 1}
    for src in config.sources:
        if 1 <= src.active_from <= config.snapshots:
            edges.add(src.active_from)
        if src.active_until is not None and 1 <= src.active_until <= config.snapshots:
            edges.add(src.active_until)
    cuts = sorted(edges)
    return list(zip(cuts[:-1], cuts[1:]))


def sinr_profile(weights: np.ndarray, config: ScenarioConfig) -> np.ndarray:
    """Linear output SINR for a whole weight trajectory.

    ``weights`` has shape (n, m): row i-1 is the weight vector in force at
    snapshot i.  Evaluates segment-wise since R_in only changes when a
    source enters or leaves.
    """
    n = weights.shape[0]
    if n > config.snapshots:
        raise ValueError("trajectory longer than the scenario")
    a_true = steering_vector(config.geometry, config.soi.doa_deg, config.soi.allow_endfire)
    out = np.empty(n)
    for start, stop in _activity_segments(config):
        if start > n:
            break
        seg = weights[start - 1 : min(stop - 1, n)]
        r_in = interference_noise_covariance(config, start).matrix
        signal = config.soi.power * np.abs(seg.conj() @ a_true) ** 2
        residual = np.einsum("ni,ij,nj->n", seg.conj(), r_in, seg).real
        with np.errstate(divide="ignore", invalid="ignore"):
            out[start - 1 : start - 1 + seg.shape[0]] = np.where(
                residual > 0, signal / residual, np.inf
            )
    return out


def mvdr_optimal_sinr(config: ScenarioConfig, i: int) -> SinrValue:
    """Optimum SINR sigma_0^2 a_true^H R_in^{-1} a_true via a dense solve."""
    a_true = steering_vector(config.geometry, config.soi.doa_deg, config.soi.allow_endfire)
    r_in = interference_noise_covariance(config, i).matrix
    try:
        z = np.linalg.solve(r_in, a_true)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            f"interference-plus-noise covariance at snapshot {i} is singular"
        ) from exc
    return SinrValue(config.soi.power * np.vdot(a_true, z).real)


def estimate_R_ccm(w: np.ndarray, batch: SnapshotBatch) -> CovarianceEstimate:
    """Sample mean of (|y(i)|^2 - 1) x(i) x(i)^H with y from the frozen w."""
    x = batch.x
    m = x.shape[1]
    if len(batch) < m:
        raise ValueError(f"need at least m={m} snapshots, got {len(batch)}")
    y = x @ w.conj()
    e = np.abs(y) ** 2 - 1.0
    r = np.einsum("n,ni,nj->ij", e, x, x.conj()) / len(batch)
    r = 0.5 * (r + r.conj().T)  # Hermitian by construction
    return CovarianceEstimate(matrix=r, sample_count=len(batch))


def step_size_bound(
    r_ccm: np.ndarray | CovarianceEstimate,
    constraint_vector: np.ndarray,
    rel_tol: float = 1e-8,
    max_iterations: int = 10_000,
) -> StepBoundReport:
    """Power-iteration estimate of 2 / |lambda_max((I - a a^H / a^H a) R_ccm)|.

    Uses a deterministic pseudo-random start vector.  Non-convergence within
    the cap is reported, not raised; a vanishing dominant eigenvalue yields
    an unbounded (infinite) report.
    """
    r = r_ccm.matrix if isinstance(r_ccm, CovarianceEstimate) else np.asarray(r_ccm)
    m = r.shape[0]
    if m == 1:
        return StepBoundReport(lambda_max=0.0, bound=math.inf, converged=True, iterations=0)
    r_vx = blocking_projector(constraint_vector) @ r

    start = np.random.Generator(np.random.Philox(0x5eed))
    v = start.standard_normal(m) + 1j * start.standard_normal(m)
    v /= np.linalg.norm(v)

    lam = 0.0 + 0.0j
    for iteration in range(1, max_iterations + 1):
        z = r_vx @ v
        lam = np.vdot(v, z)  # Rayleigh quotient; real spectrum in exact arithmetic
        if np.linalg.norm(z) == 0.0:
            return StepBoundReport(
                lambda_max=0.0, bound=math.inf, converged=True, iterations=iteration
            )
        # residual-based stop: eigenpair error is bounded by the residual scale
        if np.linalg.norm(z - lam * v) <= rel_tol * abs(lam):
            return StepBoundReport(
                lambda_max=abs(lam),
                bound=2.0 / abs(lam),
                converged=True,
                iterations=iteration,
            )
        v = z / np.linalg.norm(z)
    magnitude = abs(lam)
    return StepBoundReport(
        lambda_max=magnitude,
        bound=2.0 / magnitude if magnitude > 0 else math.inf,
        converged=False,
        iterations=max_iterations,
    )


def steady_window(n: int) -> int:
    """Length of the final-window used for steady-state statistics (last 10%)."""
    return max(1, n // 10)


def convergence_time(trace: SinrTrace, within_db: float) -> int | None:
    """First 1-based snapshot after which the dB trace stays within
    ``within_db`` of its final-window mean; None if it never settles."""
    db = trace.sinr_db
    n = db.shape[0]
    if n == 0:
        raise ValueError("empty trace")
    final_mean = float(np.mean(db[n - steady_window(n) :]))
    ok = np.abs(db - final_mean) <= within_db
    if not ok[-1]:
        return None
    bad = np.nonzero(~ok)[0]
    if bad.size == 0:
        return 1
    return int(bad[-1]) + 2  # first index after the last violation, 1-based
