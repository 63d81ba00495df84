"""Recurrence sets: membership tests, Monte-Carlo Liouville volumes, scaling laws.

A state is recurrent for (T, eps) if the flow returns within phase distance
eps at some time in [t_min, T] (t_min defaults to half the shortest period).
Volumes are estimated as level_volume times a hit fraction over Liouville
samples drawn from per-index RNG substreams, so results depend only on
(seed, samples) and never on how the work is partitioned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import (ConfigError, FlowModel, NumericalError, PhaseState,
                   substream, wilson_interval)


@dataclass(frozen=True)
class RecurrenceSpec:
    T: float
    eps: float
    t_min: float | None = None       # None = model.t0 / 2
    surrogate_factor: float = 2.0

    def resolve_t_min(self, model: FlowModel) -> float:
        t_min = 0.5 * model.t0 if self.t_min is None else self.t_min
        if not self.T > t_min:
            raise ConfigError(
                f"empty scan window: T = {self.T} must exceed t_min = {t_min}")
        if self.eps <= 0:
            raise ConfigError("eps must be positive")
        if self.eps >= model.diameter():
            # still legal; every state is trivially recurrent
            pass
        if self.surrogate_factor < 1.0:
            raise ConfigError("surrogate factor K must be >= 1")
        return t_min


@dataclass(frozen=True)
class RecurrenceEstimate:
    spec: RecurrenceSpec
    volume: float
    ci_low: float
    ci_high: float
    samples: int
    seed: int
    failed_samples: int = 0


def scan_step(model: FlowModel, eps: float, lipschitz_bound: float = 1.0) -> float:
    """Time step guaranteeing no eps-dip of the self-distance is missed by
    more than a factor 2 in eps; the self-distance is Lipschitz in t with
    constant at most the phase speed."""
    return eps / (2.0 * model.phase_speed() * lipschitz_bound)


def _golden_refine(f, a, b, tol=1e-9):
    """Golden-section minimization of f on [a, b] to time tolerance tol."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def is_recurrent(model: FlowModel, state: PhaseState, spec: RecurrenceSpec,
                 lipschitz_bound: float = 1.0, step_scale: float = 1.0):
    """(flag, witness time or None) by scanning the self-distance.

    Scans t in [t_min, T] at step eps/(2 * speed * L), refines each local
    minimum by golden section to 1e-9, and returns the first witness with
    distance <= eps.  ``step_scale`` < 1 refines the scan grid (used by the
    self-consistency checks).
    """
    t_min = spec.resolve_t_min(model)
    dt = scan_step(model, spec.eps, lipschitz_bound) * step_scale
    n = max(2, int(math.ceil((spec.T - t_min) / dt)) + 1)
    ts = np.linspace(t_min, spec.T, n)

    def dist_at(t):
        return model.distance(model.flow(state, float(t)), state)

    ds = np.array([dist_at(t) for t in ts])
    # immediate hits on grid points
    for i in range(n):
        if ds[i] <= spec.eps:
            prev_t = ts[i - 1] if i > 0 else t_min
            t_w = _golden_refine(dist_at, max(t_min, prev_t),
                                 min(spec.T, ts[min(i + 1, n - 1)]))
            t_w = min(max(t_w, t_min), spec.T)
            if dist_at(t_w) > spec.eps:
                t_w = ts[i]
            return True, float(t_w)
        # interior local minima candidates
        if 0 < i < n - 1 and ds[i] <= ds[i - 1] and ds[i] <= ds[i + 1]:
            t_w = _golden_refine(dist_at, ts[i - 1], ts[i + 1])
            t_w = min(max(t_w, t_min), spec.T)
            if dist_at(t_w) <= spec.eps:
                return True, float(t_w)
    return False, None


def scan_hits(model: FlowModel, states, spec: RecurrenceSpec,
              step_scale: float = 1.0) -> np.ndarray:
    """Grid-scan membership over the whole window, vectorized via snapshots.

    Unlike the exact window membership this genuinely samples the
    self-distance on the scan grid, so it can audit the exact path and be
    re-run at finer steps (step_scale < 1).
    """
    t_min = spec.resolve_t_min(model)
    dt = scan_step(model, spec.eps) * step_scale
    n = max(2, int(math.ceil((spec.T - t_min) / dt)) + 1)
    ts = np.linspace(t_min, spec.T, n)
    base = model.orbit_snapshots(states, np.array([0.0]))
    snaps = model.orbit_snapshots(states, ts)
    if snaps is None:
        out = []
        for st in states:
            flag, _ = is_recurrent(model, st, spec, step_scale=step_scale)
            out.append(flag)
        return np.array(out, dtype=bool)
    hits = np.zeros(len(states), dtype=bool)
    e2 = spec.eps * spec.eps
    for i in range(len(states)):
        d2 = model.snapshot_dist2(snaps[i:i + 1], base[i, 0])
        hits[i] = bool((d2 <= e2).any())
    return hits


def recurrence_volume(model: FlowModel, spec: RecurrenceSpec, samples: int,
                      seed: int, method: str = "auto",
                      step_scale: float = 1.0) -> RecurrenceEstimate:
    """Monte-Carlo Liouville volume of the recurrence set.

    method = "auto" uses the model's exact window membership when available
    (torus, suspension, sphere); "scan" forces the grid-scan membership.
    Deterministic for fixed (seed, samples).
    """
    if samples < 1000:
        raise ConfigError("need at least 10^3 samples")
    t_min = spec.resolve_t_min(model)
    states = model.sample_states(seed, samples)

    hits = None
    failed = 0
    if method == "auto":
        hits = model.recurrence_hits_exact(states, t_min, spec.T, spec.eps)
    elif method != "scan":
        raise ConfigError(f"unknown method {method!r}")
    if hits is None:
        try:
            hits = scan_hits(model, states, spec, step_scale=step_scale)
        except NumericalError:
            hits = None
        if hits is None:
            flags = []
            for st in states:
                try:
                    flag, _ = is_recurrent(model, st, spec)
                except NumericalError:
                    failed += 1
                    flag = False
                flags.append(flag)
            hits = np.array(flags, dtype=bool)

    k = int(hits.sum())
    lo, hi = wilson_interval(k, samples)
    return RecurrenceEstimate(spec=spec, volume=model.level_volume * k / samples,
                              ci_low=model.level_volume * lo,
                              ci_high=model.level_volume * hi,
                              samples=samples, seed=seed, failed_samples=failed)


def extended_volume(model: FlowModel, spec: RecurrenceSpec, samples: int,
                    seed: int, method: str = "auto") -> RecurrenceEstimate:
    """Volume of the surrogate for the extended set: recurrence at K * eps.

    The extended set (eps-neighborhood of the recurrence set) is sandwiched
    between the eps and (2 + c e^{lambda T}) eps recurrence sets; the lab
    tests the K*eps surrogate with configurable K (default 2).
    """
    widened = replace(spec, eps=spec.surrogate_factor * spec.eps)
    est = recurrence_volume(model, widened, samples, seed, method=method)
    return replace(est, spec=spec)


# ---------------------------------------------------------------------------
# scaling laws and bound checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalingFit:
    a_eps: float
    b_T: float
    logC: float
    residual: float
    mode: str


def scaling_fit(table, mode: str = "power") -> ScalingFit:
    """Least squares for log v = logC + a_eps*log(eps) + b_T*X(T).

    X(T) is log T in "power" mode and T itself in "exponential" mode.
    ``table`` holds (eps, T, volume) rows with positive volumes.
    """
    rows = [(float(e), float(t), float(v)) for (e, t, v) in table]
    if len(rows) < 6:
        raise ConfigError("need at least 6 rows")
    if any(v <= 0 for _, _, v in rows):
        raise ConfigError("volumes must be positive for a log fit")
    eps = np.array([r[0] for r in rows])
    ts = np.array([r[1] for r in rows])
    vol = np.array([r[2] for r in rows])
    if len(set(eps)) < 3 or len(set(ts)) < 3:
        raise ConfigError("need at least 3 distinct eps and 3 distinct T")
    if mode == "power":
        xt = np.log(ts)
    elif mode == "exponential":
        xt = ts
    else:
        raise ConfigError(f"unknown mode {mode!r}")
    A = np.column_stack([np.ones_like(eps), np.log(eps), xt])
    if np.linalg.matrix_rank(A) < 3:
        raise NumericalError("design grid is rank deficient")
    coef, *_ = np.linalg.lstsq(A, np.log(vol), rcond=None)
    resid = float(np.abs(A @ coef - np.log(vol)).max())
    return ScalingFit(a_eps=float(coef[1]), b_T=float(coef[2]),
                      logC=float(coef[0]), residual=resid, mode=mode)


@dataclass(frozen=True)
class BoundLaw:
    """Reference shape C * eps^a * T^b or C * eps^a * exp(rate*T)."""

    eps_exp: float
    t_exp: float | None = None
    exp_rate: float | None = None

    def value(self, eps: float, T: float) -> float:
        if (self.t_exp is None) == (self.exp_rate is None):
            raise ConfigError("law needs exactly one of t_exp / exp_rate")
        v = eps ** self.eps_exp
        if self.t_exp is not None:
            return v * T ** self.t_exp
        return v * math.exp(self.exp_rate * T)

    def describe(self) -> str:
        if self.t_exp is not None:
            return f"eps^{self.eps_exp:g} * T^{self.t_exp:g}"
        return f"eps^{self.eps_exp:g} * exp({self.exp_rate:g} T)"


@dataclass(frozen=True)
class BoundReport:
    passed: bool
    C: float
    slack: float
    worst_margin: float
    worst_index: int
    law: str


def bound_check(estimates, law: BoundLaw, anchor: int = 0,
                slack: float = 1.5) -> BoundReport:
    """PASS when every estimate's ci_low <= C * law(eps, T) * slack.

    C is calibrated so the law matches the anchor row's volume exactly.
    FAIL is a report outcome, not an error.
    """
    ests = list(estimates)
    if not ests:
        raise ConfigError("no estimates to check")
    if not 0 <= anchor < len(ests):
        raise ConfigError("anchor index out of range")
    a = ests[anchor]
    denom = law.value(a.spec.eps, a.spec.T)
    C = a.volume / denom if denom > 0 else 0.0
    worst = -math.inf
    worst_i = anchor
    passed = True
    for i, est in enumerate(ests):
        bound = C * law.value(est.spec.eps, est.spec.T) * slack
        if est.ci_low > bound:
            passed = False
        margin = est.ci_low - bound
        if margin > worst:
            worst, worst_i = margin, i
    return BoundReport(passed=passed, C=C, slack=slack, worst_margin=worst,
                       worst_index=worst_i, law=law.describe())
