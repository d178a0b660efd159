"""Monte-Carlo execution and result emission.

One trial = one synthesized snapshot batch pushed through the CCM-SG update
with one step-size mechanism.  Trials are deterministic functions of
(master_seed, run_index), so they can run in any order or in parallel and
reduce to identical traces.  Batches are keyed by run index alone: every
mechanism sees the same data in a given run, which pairs the comparison and
keeps each mechanism's trace independent of which others were requested.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .analysis import (
    SinrTrace,
    StepBoundReport,
    convergence_time,
    estimate_R_ccm,
    mvdr_optimal_sinr,
    sinr_profile,
    steady_window,
    step_size_bound,
)
from .array_model import ScenarioConfig, steering_vector, synthesize_snapshots
from .ccm import ccm_sg_update, init_weights
from .config import ExperimentSpec, MechanismSpec, OutputOptions
from .stepsize import make_mechanism

__all__ = [
    "RunResult",
    "ExperimentResult",
    "run_trial",
    "monte_carlo",
    "emit_csv",
    "write_summary",
    "run_experiment",
    "CSV_HEADER",
    "DIVERGENCE_NORM",
]

# A trial whose weight norm passes this is flagged as diverged and excluded
# from the averages rather than poisoning them.
DIVERGENCE_NORM = 1e6

CSV_HEADER = "scenario_id,mechanism,snapshot,sinr_db_mean,sinr_linear_mean,mu_mean"
COUNTER_COLUMNS = ",adds_per_update,mults_per_update"


@dataclass
class RunResult:
    """Everything recorded from a single trial.

    ``sinr_linear[i-1]`` measures the weight vector in force after
    processing snapshot i against the interference-plus-noise covariance at
    snapshot i; ``mu[i-1]`` is the step size that update actually used.
    """

    sinr_linear: np.ndarray
    mu: np.ndarray
    final_w: np.ndarray
    adds: int
    mults: int
    updates: int
    max_constraint_violation: float
    diverged: bool = False
    diverged_at: int | None = None


def run_trial(spec: ExperimentSpec, mechanism: MechanismSpec, run_index: int) -> RunResult:
    """Run one deterministic trial of one mechanism."""
    scenario = spec.scenario
    geometry = scenario.geometry
    n, m = scenario.snapshots, geometry.m

    batch = synthesize_snapshots(scenario, run_index)
    constraint = steering_vector(
        geometry, scenario.presumed_doa_deg, scenario.soi.allow_endfire
    )
    bstate = init_weights(constraint)
    mech = make_mechanism(mechanism.kind, mechanism.params)
    sstate = mech.initial_state(m)

    weights = np.zeros((n, m), dtype=np.complex128)
    mu_used = np.zeros(n)
    adds = mults = 0
    worst = 0.0
    diverged_at: int | None = None

    for i in range(n):
        x = batch.x[i]
        mu_used[i] = sstate.mu
        outcome = ccm_sg_update(bstate, x, sstate.mu)
        w = outcome.state.w
        norm_sq = np.vdot(w, w).real
        if not norm_sq <= DIVERGENCE_NORM * DIVERGENCE_NORM:
            # the update that crossed the threshold is discarded, not recorded
            diverged_at = i + 1
            break
        bstate = outcome.state
        sstate = mech.update(sstate, outcome.error, outcome.y, x, outcome.blocked_x)
        adds += sstate.adds
        mults += sstate.mults
        weights[i] = w
        violation = abs(np.vdot(w, constraint) - 1.0)
        if violation > worst:
            worst = violation

    if diverged_at is None:
        sinr = sinr_profile(weights, scenario)
    else:
        sinr = np.full(n, np.nan)
        sinr[: diverged_at - 1] = sinr_profile(weights[: diverged_at - 1], scenario)
        mu_used[diverged_at - 1 :] = np.nan

    return RunResult(
        sinr_linear=sinr,
        mu=mu_used,
        final_w=bstate.w,
        adds=adds,
        mults=mults,
        updates=n if diverged_at is None else diverged_at - 1,
        max_constraint_violation=worst,
        diverged=diverged_at is not None,
        diverged_at=diverged_at,
    )


def _trial_task(args: tuple[ExperimentSpec, MechanismSpec, int]) -> tuple[int, RunResult]:
    spec, mechanism, run_index = args
    return run_index, run_trial(spec, mechanism, run_index)


def _reduce(spec: ExperimentSpec, mechanism: MechanismSpec,
            results: dict[int, RunResult]) -> tuple[SinrTrace, RunResult | None]:
    """Mean trace over the non-diverged trials, reduced in run-index order."""
    ordered = [results[r] for r in sorted(results)]
    kept = [r for r in ordered if not r.diverged]
    n = spec.scenario.snapshots
    if kept:
        sinr = np.mean(np.stack([r.sinr_linear for r in kept]), axis=0)
        mu = np.mean(np.stack([r.mu for r in kept]), axis=0)
    else:
        sinr = np.full(n, np.nan)
        mu = np.full(n, np.nan)
    # step-size extremes cover every completed update, diverged runs included
    all_mu = np.stack([r.mu for r in ordered])
    if np.all(np.isnan(all_mu)):
        mu_low = mu_high = math.nan
    else:
        mu_low = float(np.nanmin(all_mu))
        mu_high = float(np.nanmax(all_mu))
    trace = SinrTrace(
        scenario_id=spec.scenario_id,
        mechanism=mechanism.kind,
        sinr_linear=sinr,
        mu=mu,
        runs=len(kept),
        diverged=len(ordered) - len(kept),
        max_constraint_violation=max(r.max_constraint_violation for r in ordered),
        mu_low_seen=mu_low,
        mu_high_seen=mu_high,
    )
    first = results.get(0)
    return trace, (first if first is not None and not first.diverged else None)


def monte_carlo(spec: ExperimentSpec) -> list[SinrTrace]:
    """Averaged SINR/mu traces for every configured mechanism."""
    traces = []
    for mechanism in spec.mechanisms:
        results = _collect(spec, mechanism)
        trace, _ = _reduce(spec, mechanism, results)
        traces.append(trace)
    return traces


def _collect(spec: ExperimentSpec, mechanism: MechanismSpec) -> dict[int, RunResult]:
    runs = spec.scenario.runs
    workers = spec.outputs.workers
    if workers <= 1 or runs == 1:
        return {r: run_trial(spec, mechanism, r) for r in range(runs)}
    tasks = [(spec, mechanism, r) for r in range(runs)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return dict(pool.map(_trial_task, tasks, chunksize=max(1, runs // (4 * workers))))


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    traces: list[SinrTrace]
    counter_totals: dict[str, tuple[int, int, int]]  # (adds, mults, updates)
    bound_reports: dict[str, StepBoundReport]


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    """Monte Carlo over all mechanisms plus the optional bound diagnostics."""
    traces = []
    counter_totals: dict[str, tuple[int, int, int]] = {}
    bound_reports: dict[str, StepBoundReport] = {}
    for mechanism in spec.mechanisms:
        results = _collect(spec, mechanism)
        trace, first = _reduce(spec, mechanism, results)
        traces.append(trace)
        counter_totals[mechanism.kind] = (
            sum(r.adds for r in results.values()),
            sum(r.mults for r in results.values()),
            sum(r.updates for r in results.values()),
        )
        if spec.outputs.bound_report and first is not None:
            bound_reports[mechanism.kind] = _bound_report(spec, first, trace)
    return ExperimentResult(
        spec=spec, traces=traces, counter_totals=counter_totals, bound_reports=bound_reports
    )


def _bound_report(spec: ExperimentSpec, first: RunResult, trace: SinrTrace) -> StepBoundReport:
    """Eq.-style stable-step diagnostic from a frozen post-convergence weight.

    The error-weighted covariance is estimated on a fresh batch drawn from
    the first unused run index, so it is deterministic and independent of
    the averaged data.
    """
    scenario = spec.scenario
    batch = synthesize_snapshots(scenario, scenario.runs)
    r_ccm = estimate_R_ccm(first.final_w, batch)
    constraint = steering_vector(
        scenario.geometry, scenario.presumed_doa_deg, scenario.soi.allow_endfire
    )
    report = step_size_bound(r_ccm, constraint)
    window = steady_window(len(trace))
    return replace(report, observed_mean_mu=float(np.mean(trace.mu[-window:])))


def _fmt(value: float) -> str:
    return format(value, ".10g")


def emit_csv(traces: list[SinrTrace], path: str, counters: dict[str, tuple[int, int, int]] | None = None) -> None:
    """Write the per-snapshot traces; bit-stable given identical inputs.

    With ``counters`` the per-update operation counts are appended as two
    extra columns; the default layout is exactly CSV_HEADER.
    """
    if not traces:
        raise ValueError("nothing to emit: no traces")
    header = CSV_HEADER + (COUNTER_COLUMNS if counters is not None else "")
    rows = [header]
    for trace in traces:
        db = trace.sinr_db
        extra = ""
        if counters is not None:
            adds, mults, updates = counters[trace.mechanism]
            extra = f",{_fmt(adds / updates)},{_fmt(mults / updates)}"
        for i in range(len(trace)):
            rows.append(
                f"{trace.scenario_id},{trace.mechanism},{i + 1},"
                f"{_fmt(db[i])},{_fmt(trace.sinr_linear[i])},{_fmt(trace.mu[i])}" + extra
            )
    try:
        with open(path, "w", encoding="ascii", newline="\n") as handle:
            handle.write("\n".join(rows) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def write_summary(result: ExperimentResult, path: str, margin_db: float = 3.0) -> None:
    """Convergence times, steady-state SINR, counters and bound diagnostics."""
    spec = result.spec
    n = spec.scenario.snapshots
    window = steady_window(n)
    lines = [
        f"scenario: {spec.scenario_id}",
        f"snapshots: {n}",
        f"runs: {spec.scenario.runs}",
        f"master_seed: {spec.scenario.master_seed}",
        f"sinr_opt_db: {_fmt(mvdr_optimal_sinr(spec.scenario, n).db)}",
    ]
    for trace in result.traces:
        settle = convergence_time(trace, margin_db)
        steady = float(np.mean(trace.sinr_db[-window:]))
        adds, mults, _ = result.counter_totals[trace.mechanism]
        lines += [
            f"[{trace.mechanism}]",
            f"convergence_time_{_fmt(margin_db)}db: {settle if settle is not None else 'never'}",
            f"steady_state_sinr_db: {_fmt(steady)}",
            f"mu_steady_mean: {_fmt(float(np.mean(trace.mu[-window:])))}",
            f"runs_used: {trace.runs}",
            f"diverged_runs: {trace.diverged}",
            f"adds_total: {adds}",
            f"mults_total: {mults}",
        ]
        report = result.bound_reports.get(trace.mechanism)
        if report is not None:
            lines += [
                f"bound_lambda_max: {_fmt(report.lambda_max)}",
                f"bound_mu_max: {_fmt(report.bound)}",
                f"bound_power_iteration_converged: {str(report.converged).lower()}",
            ]
    try:
        with open(path, "w", encoding="ascii", newline="\n") as handle:
            handle.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write summary to {path}: {exc}") from exc
