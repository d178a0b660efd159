"""Constrained constant-modulus stochastic-gradient weight adaptation.

The beamformer output is y(i) = w(i)^H x(i).  The cost (|y|^2 - 1)^2 is
minimized subject to w^H a0 = 1, where a0 is the presumed steering vector
of the signal of interest.  Each update moves w along the stochastic
gradient restricted to the subspace orthogonal to a0 and then re-enforces
the constraint exactly, so the feasible set is preserved at every snapshot.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

__all__ = [
    "BeamformerState",
    "UpdateOutcome",
    "init_weights",
    "beamformer_output",
    "ccm_sg_update",
    "blocking_projector",
]


class BeamformerState(NamedTuple):
    """Weight vector plus the constraint direction it is projected against."""

    w: np.ndarray
    constraint: np.ndarray
    constraint_power: float  # a0^H a0 (= m for a ULA steering vector)
    snapshot_index: int


class UpdateOutcome(NamedTuple):
    """Result of one stochastic-gradient step.

    ``y`` and ``error`` = |y|^2 - 1 are returned so step-size mechanisms can
    reuse them without recomputation; ``blocked_x`` is the input with its
    component along the constraint direction removed, which the
    gradient-adaptive (ASS) mechanism also consumes.
    """

    state: BeamformerState
    y: complex
    error: float
    blocked_x: np.ndarray


def init_weights(constraint_vector: np.ndarray) -> BeamformerState:
    """Initial state w(0) = [a0_0, 0, ..., 0]^T.

    With a unit-modulus first steering element this satisfies w^H a0 = 1
    exactly.
    """
    a = np.asarray(constraint_vector, dtype=np.complex128)
    power = np.vdot(a, a).real
    if power == 0.0:
        raise ValueError("constraint vector must be nonzero")
    w = np.zeros_like(a)
    w[0] = a[0]
    return BeamformerState(w=w, constraint=a, constraint_power=power, snapshot_index=0)


def beamformer_output(state: BeamformerState, x: np.ndarray) -> complex:
    """y = w^H x."""
    if x.shape != state.w.shape:
        raise ValueError(f"snapshot shape {x.shape} != weight shape {state.w.shape}")
    return complex(np.vdot(state.w, x))


def blocking_projector(constraint_vector: np.ndarray) -> np.ndarray:
    """Dense P = I - a a^H / (a^H a); idempotent, annihilates a."""
    a = np.asarray(constraint_vector, dtype=np.complex128)
    power = np.vdot(a, a).real
    if power == 0.0:
        raise ValueError("constraint vector must be nonzero")
    return np.eye(a.shape[0], dtype=np.complex128) - np.outer(a, a.conj()) / power


def ccm_sg_update(state: BeamformerState, x: np.ndarray, mu: float) -> UpdateOutcome:
    """One constrained constant-modulus SG step.

    w <- w - mu (|y|^2 - 1) y* P x  followed by the exact affine
    re-projection w <- w + a (1 - a^H w) / (a^H a), so the constraint holds
    to machine precision regardless of mu.
    """
    if mu < 0:
        raise ValueError(f"step size must be >= 0, got {mu}")
    w, a, power = state.w, state.constraint, state.constraint_power
    if x.shape != w.shape:
        raise ValueError(f"snapshot shape {x.shape} != weight shape {w.shape}")

    y = np.vdot(w, x)
    error = y.real * y.real + y.imag * y.imag - 1.0
    blocked = x - a * (np.vdot(a, x) / power)
    w = w - (mu * error) * y.conjugate() * blocked
    w = w + a * ((1.0 - np.vdot(a, w)) / power)
    next_state = BeamformerState(
        w=w,
        constraint=a,
        constraint_power=power,
        snapshot_index=state.snapshot_index + 1,
    )
    return UpdateOutcome(state=next_state, y=complex(y), error=float(error), blocked_x=blocked)
