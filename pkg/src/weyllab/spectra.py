"""Exact and semi-analytic eigenvalue counting: lattice points, S^3, radial problems.

Counting conventions: N(Lambda) counts Laplace eigenvalues <= Lambda
inclusively; the semiclassical parameter enters through Lambda = 1/h^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .core import ConfigError, NumericalError, ValidationError
from .surfrev import RevolutionProfile, validate_profile

COUNT_CAP = 2 ** 62


class BracketError(NumericalError):
    """Phase winding and bisection disagree on an eigenvalue count."""


@dataclass(frozen=True)
class CountQuery:
    """Eigenvalue threshold, given either as Lambda or as h with Lambda = 1/h^2."""

    lam: float

    @classmethod
    def from_lambda(cls, lam: float):
        if lam < 0:
            raise ConfigError("Lambda must be nonnegative")
        return cls(lam=float(lam))

    @classmethod
    def from_h(cls, h: float):
        if not 0.0 < h < 1.0:
            raise ConfigError("h must lie in (0, 1)")
        return cls(lam=1.0 / (h * h))

    @property
    def h(self) -> float:
        return 1.0 / math.sqrt(self.lam) if self.lam > 0 else math.inf


# ---------------------------------------------------------------------------
# flat torus: dual-lattice point counting
# ---------------------------------------------------------------------------

def _int_range_count(rem: float) -> int:
    """#integers k with k^2 <= rem, via integer-corrected floor sqrt."""
    if rem < 0.0:
        return 0
    m = int(math.floor(math.sqrt(rem)))
    while (m + 1) * (m + 1) <= rem:
        m += 1
    while m * m > rem:
        m -= 1
    return 2 * m + 1


def torus_count(basis, R: float) -> int:
    """Exact count of dual-lattice points with |k*| <= R (torus eigenvalues
    |k*|^2 <= R^2), by per-axis range reduction.  O(R^{n-1}) per query."""
    basis = np.asarray(basis, dtype=float)
    n = basis.shape[0]
    if n not in (2, 3) or basis.shape != (n, n):
        raise ConfigError("basis must be 2x2 or 3x3")
    if R < 0:
        raise ConfigError("R must be nonnegative")
    det = np.linalg.det(basis)
    if abs(det) < 1e-12:
        raise ValidationError("lattice basis is singular")
    # rough cap: ball volume over cell volume
    ball = math.pi * R * R if n == 2 else 4.0 / 3.0 * math.pi * R ** 3
    dual_cell = abs(np.linalg.det(2.0 * math.pi * np.linalg.inv(basis).T))
    if ball / dual_cell > COUNT_CAP:
        raise OverflowError("count exceeds the 64-bit budget")

    dual = 2.0 * math.pi * np.linalg.inv(basis).T      # columns span the dual
    G = dual.T @ dual
    R2 = R * R

    sq = np.allclose(G, G[0, 0] * np.eye(n), atol=1e-12 * abs(G[0, 0]))
    if sq:
        # square case: exact integer arithmetic per axis
        g = G[0, 0]
        lim2 = R2 / g
        if n == 2:
            total = 0
            kmax = int(math.floor(math.sqrt(lim2))) + 1
            for k1 in range(-kmax, kmax + 1):
                total += _int_range_count(lim2 - k1 * k1)
            return total
        total = 0
        kmax = int(math.floor(math.sqrt(lim2))) + 1
        for k1 in range(-kmax, kmax + 1):
            rem1 = lim2 - k1 * k1
            if rem1 < 0:
                continue
            k2max = int(math.floor(math.sqrt(rem1))) + 1
            for k2 in range(-k2max, k2max + 1):
                total += _int_range_count(rem1 - k2 * k2)
        return total

    # general lattice: solve the quadratic per axis, verify by direct comparison
    Ginv = np.linalg.inv(G)
    total = 0
    b1 = R * math.sqrt(Ginv[0, 0])
    for k1 in range(-int(math.floor(b1)) - 1, int(math.floor(b1)) + 2):
        if n == 2:
            # G00 k1^2 + 2 G01 k1 k2 + G11 k2^2 <= R^2
            a, b, c = G[1, 1], 2.0 * G[0, 1] * k1, G[0, 0] * k1 * k1 - R2
            disc = b * b - 4.0 * a * c
            if disc < 0:
                continue
            lo = (-b - math.sqrt(disc)) / (2.0 * a)
            hi = (-b + math.sqrt(disc)) / (2.0 * a)
            for k2 in range(int(math.ceil(lo)) - 1, int(math.floor(hi)) + 2):
                v = np.array([k1, k2], dtype=float)
                if v @ G @ v <= R2:
                    total += 1
        else:
            sub = G[1:, 1:]
            b2 = R * math.sqrt(Ginv[1, 1])
            for k2 in range(-int(math.floor(b2)) - 1, int(math.floor(b2)) + 2):
                a = G[2, 2]
                b = 2.0 * (G[0, 2] * k1 + G[1, 2] * k2)
                c = (G[0, 0] * k1 * k1 + 2.0 * G[0, 1] * k1 * k2
                     + G[1, 1] * k2 * k2 - R2)
                disc = b * b - 4.0 * a * c
                if disc < 0:
                    continue
                lo = (-b - math.sqrt(disc)) / (2.0 * a)
                hi = (-b + math.sqrt(disc)) / (2.0 * a)
                for k3 in range(int(math.ceil(lo)) - 1, int(math.floor(hi)) + 2):
                    v = np.array([k1, k2, k3], dtype=float)
                    if v @ G @ v <= R2:
                        total += 1
    return total


# ---------------------------------------------------------------------------
# round 3-sphere
# ---------------------------------------------------------------------------

def sphere3_count(lam: float) -> int:
    """Sum of multiplicities (k+1)^2 over k(k+2) <= lam.

    Closed form: with K the largest admissible k, the count is
    (K+1)(K+2)(2K+3)/6.
    """
    if lam < 0:
        raise ConfigError("Lambda must be nonnegative")
    K = int(math.floor(math.sqrt(lam + 1.0) - 1.0))
    while (K + 1) * (K + 3) <= lam:
        K += 1
    while K >= 0 and K * (K + 2) > lam:
        K -= 1
    if K < 0:
        return 0
    return (K + 1) * (K + 2) * (2 * K + 3) // 6


# ---------------------------------------------------------------------------
# radial Sturm-Liouville problems on surfaces of revolution
# ---------------------------------------------------------------------------

POLE_OFFSET = 1e-6


@dataclass(frozen=True)
class RadialProblem:
    """Angular sector m of the Laplacian: -(p f')'/w + (m^2/rho^2) f = Lambda f."""

    profile: RevolutionProfile
    m: int

    def __post_init__(self):
        if self.m < 0:
            raise ConfigError("angular momentum m must be >= 0")

    def p(self, z):
        return self.profile.sl_p(z)

    def w(self, z):
        return self.profile.weight(z)

    def potential(self, z):
        if self.m == 0:
            return np.zeros_like(np.asarray(z, dtype=float))
        return self.m ** 2 / self.profile.rho(z) ** 2


def _prufer_phase_at_mid(problem: RadialProblem, lam: float,
                         pole_offset: float = POLE_OFFSET,
                         rtol: float = 1e-10) -> float:
    """Scaled Prufer phase at the equator, shooting from the left pole.

    theta' = cos^2(theta)/p + w (lam - V) sin^2(theta), with the bounded
    solution's phase at the regularized endpoint; for large m the start moves
    to the classically allowed edge with a WKB-consistent phase.
    """
    pr = problem.profile
    m = problem.m
    z_lo = pr.a_minus + pole_offset
    z_mid = pr.z0

    z_start = z_lo
    theta0 = None
    if m >= 1:
        if lam <= 0 or m * m / pr.rho_max ** 2 >= lam:
            return 0.0          # whole sector classically forbidden
        rho_t = m / math.sqrt(lam)
        # turning point on the left half: rho(z_t) = rho_t
        lo, hi = z_lo, z_mid
        if float(pr.rho(z_lo)) > rho_t:
            z_t = z_lo
        else:
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if float(pr.rho(mid)) < rho_t:
                    lo = mid
                else:
                    hi = mid
            z_t = 0.5 * (lo + hi)
        # walk into the forbidden side until the WKB action is deep
        if z_t > z_lo + 1e-12:
            zs = np.linspace(z_t, z_lo, 200)
            kap = np.sqrt(np.maximum(
                problem.w(zs) * (problem.potential(zs) - lam) / problem.p(zs), 0.0))
            act = np.concatenate(([0.0], np.cumsum(
                0.5 * (kap[1:] + kap[:-1]) * -np.diff(zs))))
            deep = np.nonzero(act >= 18.0)[0]
            if deep.size:
                z_start = float(zs[deep[0]])
                S = math.sqrt(max(problem.p(z_start) * problem.w(z_start)
                                  * (float(problem.potential(z_start)) - lam), 0.0))
                theta0 = math.atan2(1.0, S)
    if theta0 is None:
        # pole boundary condition: f ~ (distance)^{m} in the metric distance,
        # i.e. ~ d^{m/2} in the z offset; for m = 0 the bounded solution has
        # p f'(a+d) = -lam * integral of w ~ -lam w d to first order
        if m == 0:
            theta0 = math.atan2(1.0, -lam * float(problem.w(z_start)) * pole_offset)
        else:
            theta0 = math.atan2(pole_offset,
                                float(problem.p(z_start)) * 0.5 * m)

    def rhs(z, th):
        p = float(problem.p(z))
        q = float(problem.w(z)) * (lam - float(problem.potential(z)))
        s, c = math.sin(th[0]), math.cos(th[0])
        return [c * c / p + q * s * s]

    sol = solve_ivp(rhs, (z_start, z_mid), [theta0], method="DOP853",
                    rtol=rtol, atol=1e-12)
    if not sol.success:
        raise NumericalError(f"phase integration failed: {sol.message}")
    return float(sol.y[0, -1])


def _count_nudge(lam: float) -> float:
    """Inclusive-threshold nudge dominating solver error at scale lam."""
    return lam * (1.0 + 1e-7) + 1e-9


def radial_count(problem: RadialProblem, lam: float,
                 pole_offset: float = POLE_OFFSET, rtol: float = 1e-10) -> int:
    """#eigenvalues <= lam of the radial problem, by phase winding.

    Even profiles make the left and right shooting phases equal at the
    equator, so the full winding is twice the left phase; eigenvalues sit at
    multiples of pi.
    """
    if lam < 0:
        return 0
    theta = _prufer_phase_at_mid(problem, _count_nudge(lam),
                                 pole_offset=pole_offset, rtol=rtol)
    return max(0, int(math.floor(2.0 * theta / math.pi)))


def radial_eigenvalues(problem: RadialProblem, lam_max: float,
                       rtol: float = 1e-8, max_count: int | None = None) -> list[float]:
    """Eigenvalues <= lam_max in order, each bisected to relative tolerance rtol.

    The winding count at lam_max fixes how many eigenvalues exist; a
    disagreement with the bisection brackets raises BracketError.
    ``max_count`` truncates to the lowest eigenvalues when only the bottom of
    the spectrum is needed.
    """
    if lam_max < 0:
        raise ConfigError("lam_max must be nonnegative")
    n_target = radial_count(problem, lam_max)
    if n_target == 0:
        return []
    n_want = n_target if max_count is None else min(n_target, max_count)

    def winding(lam):
        return 2.0 * _prufer_phase_at_mid(problem, lam) / math.pi

    out = []
    lo_all = -1.0
    for k in range(1, n_want + 1):
        lo, hi = lo_all, _count_nudge(lam_max)
        if winding(hi) < k:
            raise BracketError(f"phase winding lost eigenvalue {k}")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if winding(mid) >= k:
                hi = mid
            else:
                lo = mid
            if hi - lo <= rtol * max(1.0, abs(hi)):
                break
        out.append(0.5 * (lo + hi))
        lo_all = lo           # eigenvalues are ordered; warm-start the next bracket
    if len(out) != n_want:
        raise BracketError("bisection found a different count than the winding")
    return out


def surfrev_count(profile: RevolutionProfile, lam: float,
                  pole_offset: float = POLE_OFFSET, rtol: float = 1e-10) -> int:
    """Counting function of the surface Laplacian: sum of radial counts over
    angular sectors |m| <= M, doubled for m != 0.

    The cutoff M = ceil(rho_max sqrt(lam)) + 2 is safe: beyond it the
    potential floor m^2/rho_max^2 exceeds lam, so those sectors are empty.
    """
    if isinstance(profile, dict):
        profile = validate_profile(profile)
    if lam < 0:
        raise ConfigError("Lambda must be nonnegative")
    M = int(math.ceil(profile.rho_max * math.sqrt(max(lam, 0.0)))) + 2
    total = 0
    for m in range(0, M + 1):
        if m >= 1 and m * m / profile.rho_max ** 2 > _count_nudge(lam):
            break
        try:
            cnt = radial_count(RadialProblem(profile, m), lam,
                               pole_offset=pole_offset, rtol=rtol)
        except NumericalError as e:
            raise NumericalError(f"angular sector m = {m} failed: {e}") from e
        total += cnt if m == 0 else 2 * cnt
    return total


# ---------------------------------------------------------------------------
# Weyl leading terms
# ---------------------------------------------------------------------------

_BALL_VOL = {1: 2.0, 2: math.pi, 3: 4.0 * math.pi / 3.0}


def weyl_leading(model, h: float) -> float:
    """Leading eigenvalue count (2 pi h)^-n * vol(B^n) * vol(X).

    For surfaces this is Area/(4 pi) * Lambda; for the square torus of side
    2 pi it is pi R^2 with R = 1/h.
    """
    if not 0.0 < h < 1.0:
        raise ConfigError("h must lie in (0, 1)")
    n = model.base_dim
    vol = model.riemannian_volume()
    return (2.0 * math.pi * h) ** (-n) * _BALL_VOL[n] * vol
