"""Blind adaptive beamforming simulator.

Constrained constant-modulus stochastic-gradient beamforming on a uniform
linear array, with interchangeable step-size mechanisms (FSS, ASS, MASS,
TAASS), SINR benchmarking against the MVDR optimum, and a deterministic
Monte-Carlo harness.
"""

from .analysis import (
    CovarianceEstimate,
    SinrTrace,
    SinrValue,
    StepBoundReport,
    convergence_time,
    estimate_R_ccm,
    interference_noise_covariance,
    mvdr_optimal_sinr,
    output_sinr,
    step_size_bound,
)
from .array_model import (
    ArrayGeometry,
    ScenarioConfig,
    SnapshotBatch,
    SourceSpec,
    active_sources,
    steering_vector,
    synthesize_snapshots,
)
from .ccm import (
    BeamformerState,
    beamformer_output,
    blocking_projector,
    ccm_sg_update,
    init_weights,
)
from .config import ConfigError, ExperimentSpec, MechanismSpec, OutputOptions, parse_config
from .harness import RunResult, emit_csv, monte_carlo, run_experiment, run_trial
from .presets import list_presets, load_preset, preset_text
from .stepsize import (
    AssParams,
    FssParams,
    MassParams,
    StepSizeBounds,
    StepSizeState,
    TaassParams,
    clamp,
    fss_update,
    mass_update,
    taass_update,
)

__version__ = "0.1.0"
