"""Step-size mechanisms for the CCM-SG beamformer.

Four interchangeable rules control mu(i):

* FSS   -- fixed step size, the classic baseline.
* ASS   -- gradient-adaptive baseline that tracks d w / d mu with an
           auxiliary vector g(i); its per-update cost grows with the array
           size, which is exactly what the two rules below avoid.
* MASS  -- mu(i+1) = alpha mu(i) + gamma e(i)^2 with e = |y|^2 - 1.
* TAASS -- mu(i+1) = alpha mu(i) + gamma v(i)^2 where v is an exponential
           time average of e(i) e(i-1).

All rules clamp the result into [mu_min, mu_max] after updating.  Every
update reports how many scalar additions and multiplications it consumed;
the prediction error e is computed once by the core update and passed in,
never recomputed here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

__all__ = [
    "StepSizeBounds",
    "FssParams",
    "MassParams",
    "TaassParams",
    "AssParams",
    "StepSizeState",
    "clamp",
    "fss_update",
    "mass_update",
    "taass_update",
    "ass_update",
    "make_mechanism",
    "MECHANISM_KINDS",
]


@dataclass(frozen=True)
class StepSizeBounds:
    """Clamping range for mu; requires 0 < mu_min < mu_max."""

    mu_min: float
    mu_max: float

    def __post_init__(self) -> None:
        if not 0 < self.mu_min < self.mu_max:
            raise ValueError(
                f"bounds require 0 < mu_min < mu_max, got [{self.mu_min}, {self.mu_max}]"
            )


def clamp(mu: float, bounds: StepSizeBounds) -> float:
    """Three-way case split: mu_max above, mu_min below, mu otherwise."""
    if mu > bounds.mu_max:
        return bounds.mu_max
    if mu < bounds.mu_min:
        return bounds.mu_min
    return mu


def _check_mu0(mu0: float, bounds: StepSizeBounds) -> None:
    if not bounds.mu_min <= mu0 <= bounds.mu_max:
        raise ValueError(f"mu0={mu0} outside [{bounds.mu_min}, {bounds.mu_max}]")


@dataclass(frozen=True)
class FssParams:
    mu: float

    def __post_init__(self) -> None:
        if self.mu < 0:
            raise ValueError(f"fixed step size must be >= 0, got {self.mu}")


@dataclass(frozen=True)
class MassParams:
    alpha: float
    gamma: float
    bounds: StepSizeBounds
    mu0: float

    def __post_init__(self) -> None:
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        _check_mu0(self.mu0, self.bounds)


@dataclass(frozen=True)
class TaassParams:
    alpha: float
    gamma: float
    beta: float
    bounds: StepSizeBounds
    mu0: float
    v0: float = 0.0

    def __post_init__(self) -> None:
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not 0 < self.beta < 1:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")
        _check_mu0(self.mu0, self.bounds)

    @property
    def one_minus_beta(self) -> float:
        return 1.0 - self.beta


@dataclass(frozen=True)
class AssParams:
    rho: float
    bounds: StepSizeBounds
    mu0: float

    def __post_init__(self) -> None:
        if self.rho < 0:
            raise ValueError(f"rho must be >= 0, got {self.rho}")
        _check_mu0(self.mu0, self.bounds)


class StepSizeState(NamedTuple):
    """Evolving per-trial state shared by all mechanisms.

    ``v`` and ``prev_error`` are only used by TAASS; ``g`` (the auxiliary
    weight-gradient vector) only by ASS.  ``adds``/``mults`` report the
    scalar operations consumed by the most recent update.
    """

    mu: float
    v: float = 0.0
    prev_error: float = 0.0
    adds: int = 0
    mults: int = 0
    g: np.ndarray | None = None


def fss_update(state: StepSizeState, error: float) -> StepSizeState:
    """Fixed step size: mu never changes and no arithmetic is spent."""
    return state._replace(adds=0, mults=0)


def mass_update(state: StepSizeState, error: float, params: MassParams) -> StepSizeState:
    """mu <- clamp(alpha mu + gamma e^2)."""
    mu = clamp(params.alpha * state.mu + params.gamma * (error * error), params.bounds)
    # alpha*mu, e*e, gamma*(e*e) and one addition
    return state._replace(mu=mu, adds=1, mults=3)


def taass_update(state: StepSizeState, error: float, params: TaassParams) -> StepSizeState:
    """v <- beta v + (1-beta) e(i) e(i-1); mu <- clamp(alpha mu + gamma v^2).

    (1-beta) is precomputed at construction; e(i-1) starts at 0, so the
    first call is pure decay.
    """
    v = params.beta * state.v + params.one_minus_beta * (error * state.prev_error)
    mu = clamp(params.alpha * state.mu + params.gamma * (v * v), params.bounds)
    # beta*v, e*e_prev, (1-beta)*(..), v*v, gamma*(..), alpha*mu; two additions
    return state._replace(mu=mu, v=v, prev_error=error, adds=2, mults=6)


def ass_update(
    state: StepSizeState,
    error: float,
    y: complex,
    x: np.ndarray,
    blocked_x: np.ndarray,
    params: AssParams,
) -> StepSizeState:
    """Gradient-adaptive baseline.

    Maintains g(i) ~ d w(i) / d mu through

        g(i+1) = (I - mu(i) e(i) v(i) x(i)^H) g(i) - e(i) y*(i) v(i)

    with v(i) = P x(i) the blocked input reused from the core update, and
    adapts the step size along the cost gradient with respect to mu:

        mu(i+1) = clamp(mu(i) - rho Re{e(i) y*(i) x(i)^H g(i)}).
    """
    g = state.g if state.g is not None else np.zeros_like(x)
    t = np.vdot(x, g)  # x^H g
    ey = error * y.conjugate()
    g_next = g - (state.mu * error * t) * blocked_x - ey * blocked_x
    mu = clamp(state.mu - params.rho * (ey * t).real, params.bounds)
    m = x.shape[0]
    # Real-op tally with complex ops decomposed (cc mult = 4 mults + 2 adds,
    # rc mult = 2 mults, c add = 2 adds): x^H g -> 4m / 4m-2; forming and
    # subtracting the two scaled blocked_x terms -> 8m+5 / 8m; mu line -> 3 / 2.
    return StepSizeState(
        mu=mu, v=0.0, prev_error=error, adds=12 * m, mults=12 * m + 8, g=g_next
    )


class _FssMechanism:
    kind = "fss"

    def __init__(self, params: FssParams) -> None:
        self.params = params

    def initial_state(self, m: int) -> StepSizeState:
        return StepSizeState(mu=self.params.mu)

    def update(
        self, state: StepSizeState, error: float, y: complex, x: np.ndarray, blocked_x: np.ndarray
    ) -> StepSizeState:
        return fss_update(state, error)


class _MassMechanism:
    kind = "mass"

    def __init__(self, params: MassParams) -> None:
        self.params = params

    def initial_state(self, m: int) -> StepSizeState:
        return StepSizeState(mu=self.params.mu0)

    def update(self, state, error, y, x, blocked_x) -> StepSizeState:
        return mass_update(state, error, self.params)


class _TaassMechanism:
    kind = "taass"

    def __init__(self, params: TaassParams) -> None:
        self.params = params

    def initial_state(self, m: int) -> StepSizeState:
        return StepSizeState(mu=self.params.mu0, v=self.params.v0, prev_error=0.0)

    def update(self, state, error, y, x, blocked_x) -> StepSizeState:
        return taass_update(state, error, self.params)


class _AssMechanism:
    kind = "ass"

    def __init__(self, params: AssParams) -> None:
        self.params = params

    def initial_state(self, m: int) -> StepSizeState:
        return StepSizeState(mu=self.params.mu0, g=np.zeros(m, dtype=np.complex128))

    def update(self, state, error, y, x, blocked_x) -> StepSizeState:
        return ass_update(state, error, y, x, blocked_x, self.params)


MechanismParams = Union[FssParams, MassParams, TaassParams, AssParams]

_MECHANISMS = {
    "fss": (_FssMechanism, FssParams),
    "mass": (_MassMechanism, MassParams),
    "taass": (_TaassMechanism, TaassParams),
    "ass": (_AssMechanism, AssParams),
}

MECHANISM_KINDS = tuple(_MECHANISMS)


def make_mechanism(kind: str, params: MechanismParams):
    """Instantiate the update rule named ``kind`` for harness use."""
    try:
        cls, expected = _MECHANISMS[kind]
    except KeyError:
        raise ValueError(f"unknown mechanism {kind!r}; known: {', '.join(_MECHANISMS)}")
    if not isinstance(params, expected):
        raise TypeError(f"mechanism {kind!r} expects {expected.__name__}")
    return cls(params)
