"""Shared phase-space primitives: states, the flow-model protocol, errors, RNG streams."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

ENERGY_RTOL = 1e-9


class WeylLabError(Exception):
    """Base class for package errors."""


class ConfigError(WeylLabError):
    """Invalid configuration, profile or spec parameters (CLI exit code 2)."""


class ValidationError(ConfigError):
    """A domain-object invariant failed; message names the condition and witness."""


class NumericalError(WeylLabError):
    """A numerical routine could not meet its tolerance contract (CLI exit code 3)."""


class IntegrationError(NumericalError):
    """Adaptive stepper failed to meet tolerance within its budget."""


class ResolutionError(NumericalError):
    """Grid too coarse to resolve a feature; caller must refine."""


class SampleStarvationError(NumericalError):
    """A greedy construction exhausted its sample pool."""


@dataclass(frozen=True)
class DistanceSpec:
    """Documentation record of a model's phase distance."""

    kind: str            # "flat-quotient" | "quotient-patch" | "geodesic-chord" | "embedding"
    position_part: str
    momentum_part: str
    exact_triangle: bool = True


@dataclass(frozen=True)
class PhaseState:
    """A point of an energy level: chart position, cosphere momentum, energy.

    ``position`` and ``momentum`` are 1-d float arrays in the owning model's
    chart; ``momentum`` may be empty for models whose states are plain
    manifold points (the suspension flow).
    """

    position: np.ndarray
    momentum: np.ndarray
    energy: float

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        object.__setattr__(self, "momentum", np.asarray(self.momentum, dtype=float))


def substream(seed: int, index: int) -> np.random.Generator:
    """Deterministic RNG substream keyed by (seed, sample index).

    Uses disjoint Philox counter blocks so draws for sample ``index`` are
    independent of how samples are partitioned across workers.
    """
    bitgen = np.random.Philox(key=np.uint64(seed) & np.uint64(0xFFFFFFFFFFFFFFFF),
                              counter=[0, 0, 0, np.uint64(index)])
    return np.random.Generator(bitgen)


class FlowModel:
    """Protocol for the model systems: flow, tangent flow, distance, sampling.

    Concrete models set ``kind``, ``t0`` (shortest closed-orbit period),
    ``level_volume`` (Liouville volume of the unit energy level),
    ``dim_level`` (dimension m of the level) and ``base_dim`` (dimension n
    of the underlying manifold), and implement the methods below.  All model
    objects are immutable after construction and all methods are pure.
    """

    kind: str = "abstract"
    t0: float = 1.0
    level_volume: float = 1.0
    dim_level: int = 1
    base_dim: int = 1

    # -- required interface -------------------------------------------------

    def hamiltonian(self, position: np.ndarray, momentum: np.ndarray) -> float:
        raise NotImplementedError

    def distance_spec(self) -> "DistanceSpec":
        raise NotImplementedError

    def flow(self, state: PhaseState, t: float) -> PhaseState:
        raise NotImplementedError

    def tangent_flow(self, state: PhaseState, t: float) -> np.ndarray:
        """Jacobian of the time-t flow, in canonical orthonormal frames of the level."""
        raise NotImplementedError

    def log_tangent_norm(self, state: PhaseState, t: float) -> float:
        """ln of the tangent-flow operator norm; overflow-safe where overridden."""
        import numpy as _np
        return float(_np.log(_np.linalg.norm(self.tangent_flow(state, t), 2)))

    def distance(self, s1: PhaseState, s2: PhaseState) -> float:
        raise NotImplementedError

    def liouville_sample(self, rng: np.random.Generator) -> PhaseState:
        raise NotImplementedError

    # -- shared helpers ------------------------------------------------------

    def riemannian_volume(self) -> float:
        raise NotImplementedError

    def diameter(self) -> float:
        """Upper bound on the phase distance between any two level states."""
        raise NotImplementedError

    def phase_speed(self) -> float:
        """Upper bound on d/dt of t -> distance(flow(s,t), s); sets scan steps."""
        raise NotImplementedError

    def make_state(self, position, momentum) -> PhaseState:
        pos = np.asarray(position, dtype=float)
        mom = np.asarray(momentum, dtype=float)
        return PhaseState(pos, mom, self.hamiltonian(pos, mom))

    def check_state(self, state: PhaseState) -> None:
        h = self.hamiltonian(state.position, state.momentum)
        ref = max(abs(state.energy), 1e-300)
        if abs(h - state.energy) > ENERGY_RTOL * max(1.0, ref):
            raise ValidationError(
                f"state energy {state.energy!r} does not match Hamiltonian {h!r}")

    def sample_states(self, seed: int, n: int) -> list[PhaseState]:
        """n Liouville samples; element i is drawn from substream(seed, i)."""
        return [self.liouville_sample(substream(seed, i)) for i in range(n)]

    # Optional fast paths (None => caller falls back to the generic route).

    def recurrence_hits_exact(self, states, t_min, t_max, eps):
        """Vectorized exact recurrence membership, or None if unavailable."""
        return None

    def orbit_snapshots(self, states, ts):
        """(S, G, D) feature array of flowed states, or None if unavailable."""
        return None

    def snapshot_dist2(self, rows, row):
        """Squared phase distances between snapshot rows, shape (K, G)."""
        raise NotImplementedError


def wilson_interval(hits: int, n: int, z: float = 1.959963984540054):
    """95% Wilson score interval for a binomial fraction; valid at small counts."""
    if n <= 0:
        raise ValueError("need n >= 1")
    phat = hits / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = (z / denom) * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n))
    lo = 0.0 if hits == 0 else max(0.0, center - half)
    hi = 1.0 if hits == n else min(1.0, center + half)
    return lo, hi
