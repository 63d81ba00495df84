"""Remainder series, exponent fits, the parameter planner, and bound verification.

Remainders follow N = leading * (1 + h * R_h) with vanishing sub-principal
term, so R_h = (N/leading - 1)/h exactly.  The planner reproduces the closed
parameter choices (delta, eps, T) per model class and the predicted remainder
bound shape at a given h.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ConfigError
from .invariants import ehrenfest_time
from .spectra import weyl_leading


@dataclass(frozen=True)
class WeylSeriesRow:
    h: float
    N: int
    leading: float
    R_h: float


def remainder_series(counts, model) -> list[WeylSeriesRow]:
    """Rows (h, N, leading, R_h) from (h, N) pairs; exact algebraic extraction."""
    rows = []
    seen = set()
    for h, N in counts:
        h = float(h)
        if not 0.0 < h < 1.0:
            raise ConfigError("h values must lie in (0, 1)")
        if h in seen:
            raise ConfigError(f"duplicate h value {h}")
        seen.add(h)
        lead = weyl_leading(model, h)
        rh = (N / lead - 1.0) / h
        rows.append(WeylSeriesRow(h=h, N=int(N), leading=lead, R_h=rh))
    return rows


@dataclass(frozen=True)
class RemainderFit:
    exponent: float
    constant: float
    residual: float
    mode: str


def remainder_exponent_fit(series, log_mode: bool = False) -> RemainderFit:
    """Fit |R_h| against h^a (log-log least squares) or against 1/|ln h|.

    Rows with R_h = 0 are excluded (log of zero); power mode needs >= 8 rows
    spanning at least two decades of h.
    """
    rows = [r for r in series if r.R_h != 0.0]
    if log_mode:
        if len(rows) < 2:
            raise ConfigError("need at least 2 nonzero rows")
        x = np.array([1.0 / abs(math.log(r.h)) for r in rows])
        y = np.array([abs(r.R_h) for r in rows])
        k = float((x @ y) / (x @ x))
        resid = float(np.abs(y - k * x).max())
        return RemainderFit(exponent=0.0, constant=k, residual=resid, mode="log")
    if len(rows) < 8:
        raise ConfigError("need at least 8 nonzero rows")
    hs = np.array([r.h for r in rows])
    if math.log10(hs.max() / hs.min()) < 2.0:
        raise ConfigError("h range must span at least two decades")
    A = np.column_stack([np.ones(len(rows)), np.log(hs)])
    y = np.log(np.array([abs(r.R_h) for r in rows]))
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.abs(A @ coef - y).max())
    return RemainderFit(exponent=float(coef[1]), constant=float(math.exp(coef[0])),
                        residual=resid, mode="power")


@dataclass(frozen=True)
class PlanResult:
    model_class: str          # "anosov" | "lie_group" | "surfrev"
    delta: float
    eps: float
    T: float
    predicted_bound: float
    h: float
    p: int | None = None
    r: int | None = None
    ell: float | None = None
    lambda_max: float | None = None
    T_E: float = math.inf

    def bound_shape(self, h):
        """The predicted |R_h| shape at another h (same class parameters)."""
        if self.model_class == "anosov":
            return 4.0 * (self.lambda_max + self.ell) / abs(math.log(h))
        if self.model_class == "lie_group":
            return h ** ((self.p - 1) / (3.0 * self.p + 1.0))
        return h ** (1.0 / (4.0 * self.r - 1.0))


def plan_parameters(model_class: str, h: float, p: int | None = None,
                    r: int | None = None, ell: float | None = None,
                    lambda_max: float | None = None, c: float = 1.0) -> PlanResult:
    """Closed parameter choices (delta, eps = c h^delta, T) per model class.

    anosov:    delta = 1/4, T = T_E/4 with T_E = |ln h|/(Lambda + ell);
    lie_group: delta = 0 (p = 1) or (p+1)/(3p+1), T = h^{-(p-1)/(3p+1)};
    surfrev:   delta = (2r-1)/(4r-1), T = h^{-1/(4r-1)}.
    Raises when T would exceed the (1/2 - delta) T_E cap.
    """
    if not 0.0 < h < 1.0:
        raise ConfigError("h must lie in (0, 1)")
    if model_class == "anosov":
        if lambda_max is None or ell is None:
            raise ConfigError("anosov plan needs lambda_max and ell")
        if ell <= 0:
            raise ConfigError("ell must be positive")
        delta = 0.25
        t_e = ehrenfest_time(lambda_max, ell, h)
        T = 0.25 * t_e
        bound = 4.0 * (lambda_max + ell) / abs(math.log(h))
        plan = PlanResult(model_class="anosov", delta=delta, eps=c * h ** delta,
                          T=T, predicted_bound=bound, h=h, ell=ell,
                          lambda_max=lambda_max, T_E=t_e)
    elif model_class == "lie_group":
        if p is None or p < 1 or int(p) != p:
            raise ConfigError("lie_group plan needs integer rank p >= 1")
        p = int(p)
        delta = 0.0 if p == 1 else (p + 1.0) / (3.0 * p + 1.0)
        T = h ** (-(p - 1.0) / (3.0 * p + 1.0))
        bound = h ** ((p - 1.0) / (3.0 * p + 1.0))
        plan = PlanResult(model_class="lie_group", delta=delta, eps=c * h ** delta,
                          T=T, predicted_bound=bound, h=h, p=p)
    elif model_class == "surfrev":
        if r is None or r < 1 or int(r) != r:
            raise ConfigError("surfrev plan needs integer order r >= 1")
        r = int(r)
        delta = (2.0 * r - 1.0) / (4.0 * r - 1.0)
        T = h ** (-1.0 / (4.0 * r - 1.0))
        bound = h ** (1.0 / (4.0 * r - 1.0))
        plan = PlanResult(model_class="surfrev", delta=delta, eps=c * h ** delta,
                          T=T, predicted_bound=bound, h=h, r=r)
    else:
        raise ConfigError(f"unknown model class {model_class!r}")
    if plan.delta >= 0.5:
        raise ConfigError("delta must stay below 1/2")
    if math.isfinite(plan.T_E) and plan.T > (0.5 - plan.delta) * plan.T_E * (1 + 1e-12):
        raise ConfigError("plan infeasible: T exceeds (1/2 - delta) * Ehrenfest time")
    return plan


@dataclass(frozen=True)
class RemainderBoundReport:
    passed: bool
    C: float
    slack: float
    worst_margin: float
    worst_h: float
    shape: str


def verify_bound(series, shape, slack: float = 1.5) -> RemainderBoundReport:
    """PASS when |R_h| <= C * shape(h) * slack for all rows.

    C is calibrated at the row with the largest h.  ``shape`` is either a
    PlanResult (its bound_shape is used), a float exponent e for h^e, or the
    string "log" for the 1/|ln h| form.  FAIL is a report outcome.
    """
    rows = sorted(series, key=lambda r: -r.h)
    if not rows:
        raise ConfigError("empty series")

    if isinstance(shape, PlanResult):
        fn = shape.bound_shape
        label = f"plan[{shape.model_class}]"
    elif shape == "log":
        fn = lambda h: 1.0 / abs(math.log(h))
        label = "1/|ln h|"
    else:
        e = float(shape)
        fn = lambda h: h ** e
        label = f"h^{e:g}"

    C = abs(rows[0].R_h) / fn(rows[0].h)
    passed = True
    worst = -math.inf
    worst_h = rows[0].h
    for r in rows:
        bound = C * fn(r.h) * slack
        margin = abs(r.R_h) - bound
        if margin > 0:
            passed = False
        if margin > worst:
            worst, worst_h = margin, r.h
    return RemainderBoundReport(passed=passed, C=C, slack=slack,
                                worst_margin=worst, worst_h=worst_h, shape=label)
