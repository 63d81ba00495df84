"""Strictly convex surfaces of revolution: profiles, Clairaut data, equatorial return maps.

A profile is the function rho(z) > 0 on (a-, a+) whose rotation about the
z-axis generates the surface.  Geodesics leaving the equator are described by
the first-return time tau(alpha) and rotation angle theta(alpha); both are
computed two independent ways (turning-point quadrature here, Hamilton ODE in
``first_return``) so either can audit the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .core import ConfigError, NumericalError, PhaseState, ResolutionError, ValidationError

ENDPOINT_OFFSET = 1e-6       # pole-limit checks evaluate rho, rho' here
POLE_RHO_MAX = 1e-2          # rho at the offset must be below this
POLE_SLOPE_MIN = 1e2         # |rho'| at the offset must exceed this
CONVEXITY_GRID = 10_001      # interior points for the strict-convexity check

_GAUSS_N = 12
_GLX, _GLW = np.polynomial.legendre.leggauss(_GAUSS_N)


class NoReturnError(NumericalError):
    """Geodesic failed to re-cross the equator within the time budget."""


# ---------------------------------------------------------------------------
# profile presets
# ---------------------------------------------------------------------------

def _sphere_derivs():
    def d0(z):
        return np.sqrt(1.0 - np.asarray(z) ** 2)

    def d1(z):
        z = np.asarray(z)
        return -z / np.sqrt(1.0 - z ** 2)

    def d2(z):
        z = np.asarray(z)
        return -(1.0 - z ** 2) ** -1.5

    def d3(z):
        z = np.asarray(z)
        return -3.0 * z * (1.0 - z ** 2) ** -2.5

    rho2_u = np.array([1.0, -1.0])       # rho^2 = 1 - u, u = z^2
    return d0, d1, d2, d3, (-1.0, 1.0), rho2_u


def _spheroid_derivs(a, c):
    # rho = a*sqrt(1 - z^2/c^2); second derivative collapses to -a/c^2 * u^-3/2
    def u(z):
        return 1.0 - np.asarray(z) ** 2 / c ** 2

    def d0(z):
        return a * np.sqrt(u(z))

    def d1(z):
        return -(a / c ** 2) * np.asarray(z) / np.sqrt(u(z))

    def d2(z):
        return -(a / c ** 2) * u(z) ** -1.5

    def d3(z):
        return -3.0 * (a / c ** 4) * np.asarray(z) * u(z) ** -2.5

    rho2_u = np.array([a * a, -a * a / (c * c)])
    return d0, d1, d2, d3, (-c, c), rho2_u


def _spheroid_bump_derivs(a, c, eps):
    # rho = spheroid * (1 + eps*z^4): keeps the pole behaviour, perturbs the bulk
    s0, s1, s2, s3, dom, s_rho2 = _spheroid_derivs(a, c)

    def b0(z):
        return 1.0 + eps * np.asarray(z) ** 4

    def b1(z):
        return 4.0 * eps * np.asarray(z) ** 3

    def b2(z):
        return 12.0 * eps * np.asarray(z) ** 2

    def b3(z):
        return 24.0 * eps * np.asarray(z)

    def d0(z):
        return s0(z) * b0(z)

    def d1(z):
        return s1(z) * b0(z) + s0(z) * b1(z)

    def d2(z):
        return s2(z) * b0(z) + 2.0 * s1(z) * b1(z) + s0(z) * b2(z)

    def d3(z):
        return (s3(z) * b0(z) + 3.0 * s2(z) * b1(z)
                + 3.0 * s1(z) * b2(z) + s0(z) * b3(z))

    # rho^2 = a^2 (1 - u/c^2) (1 + eps u^2)^2 as a polynomial in u = z^2
    bsq = np.array([1.0, 0.0, 2.0 * eps, 0.0, eps * eps])
    rho2_u = np.convolve(s_rho2, bsq)
    return d0, d1, d2, d3, dom, rho2_u


def _even_poly_derivs(coeffs_even, domain):
    # coeffs_even = [c0, c2, c4, ...] for rho(z) = c0 + c2 z^2 + ...
    full = np.zeros(2 * len(coeffs_even) - 1)
    full[::2] = coeffs_even
    p0 = np.polynomial.Polynomial(full)
    p1, p2, p3 = p0.deriv(1), p0.deriv(2), p0.deriv(3)
    qu = np.asarray(coeffs_even, dtype=float)      # rho as polynomial in u
    rho2_u = np.convolve(qu, qu)
    return ((lambda z: p0(np.asarray(z))), (lambda z: p1(np.asarray(z))),
            (lambda z: p2(np.asarray(z))), (lambda z: p3(np.asarray(z))),
            (float(domain[0]), float(domain[1])), rho2_u)


@dataclass(frozen=True, eq=False)
class RevolutionProfile:
    """Validated profile of a strictly convex surface of revolution."""

    name: str
    params: dict
    a_minus: float
    a_plus: float
    z0: float
    rho_max: float
    equator_length: float
    _d: tuple = field(repr=False)
    rho2_u: np.ndarray = field(repr=False, default=None)
    _cache: dict = field(default_factory=dict, repr=False)

    # pointwise data ---------------------------------------------------------

    def rho(self, z):
        return self._d[0](z)

    def drho(self, z):
        return self._d[1](z)

    def d2rho(self, z):
        return self._d[2](z)

    def d3rho(self, z):
        return self._d[3](z)

    def weight(self, z):
        """Area density w(z) = rho*sqrt(1+rho'^2) (area element = w dz dphi)."""
        return self.rho(z) * np.sqrt(1.0 + self.drho(z) ** 2)

    def sl_p(self, z):
        """Sturm-Liouville coefficient p(z) = rho/sqrt(1+rho'^2)."""
        return self.rho(z) / np.sqrt(1.0 + self.drho(z) ** 2)

    @property
    def span(self):
        return self.a_plus - self.a_minus

    # cached geometry --------------------------------------------------------

    def _tables(self):
        """Clustered-z grid with arc length and area cumulatives (pole-safe)."""
        tab = self._cache.get("tables")
        if tab is None:
            n = 8193
            u = np.linspace(0.0, 1.0, n)
            z = self.a_minus + self.span * np.sin(0.5 * np.pi * u) ** 2
            dz_du = self.span * 0.5 * np.pi * np.sin(np.pi * u)
            rp = self.drho(z[1:-1])
            arc_integ = np.empty(n)
            arc_integ[1:-1] = np.sqrt(1.0 + rp ** 2) * dz_du[1:-1]
            # endpoints: sqrt(1+rho'^2)*dz/du stays finite; extrapolate
            arc_integ[0] = 2 * arc_integ[1] - arc_integ[2]
            arc_integ[-1] = 2 * arc_integ[-2] - arc_integ[-3]
            w_integ = np.empty(n)
            w_integ[1:-1] = self.weight(z[1:-1]) * dz_du[1:-1]
            w_integ[0] = 0.0
            w_integ[-1] = 0.0
            du = u[1] - u[0]
            ell = np.concatenate(
                ([0.0], np.cumsum(0.5 * (arc_integ[1:] + arc_integ[:-1]) * du)))
            warea = np.concatenate(
                ([0.0], np.cumsum(0.5 * (w_integ[1:] + w_integ[:-1]) * du)))
            tab = {"z": z, "ell": ell, "warea": warea}
            self._cache["tables"] = tab
        return tab

    def arc_from_z(self, z):
        t = self._tables()
        return np.interp(z, t["z"], t["ell"])

    def z_from_arc(self, ell):
        t = self._tables()
        return np.interp(ell, t["ell"], t["z"])

    @property
    def meridian_length(self):
        """Arc length of the profile curve from pole to pole."""
        return float(self._tables()["ell"][-1])

    @property
    def area(self):
        return float(2.0 * np.pi * self._tables()["warea"][-1])

    def area_band(self, z_lo, z_hi):
        """Surface area of the band z in [z_lo, z_hi] by adaptive quadrature."""
        val, _ = quad(lambda zz: float(self.weight(zz)), z_lo, z_hi, limit=200)
        return 2.0 * np.pi * val

    @property
    def c_floor(self):
        """Clairaut constants below this are treated as meridians."""
        val = self._cache.get("c_floor")
        if val is None:
            dz = 1e-12 * self.span
            val = 1.0000001 * max(float(self.rho(self.a_plus - dz)),
                                  float(self.rho(self.a_minus + dz)),
                                  1e-9 * self.rho_max)
            self._cache["c_floor"] = val
        return val

    def max_normal_curvature(self):
        """Bound on surface curvature; sets phase-speed bounds for scans."""
        val = self._cache.get("kmax")
        if val is None:
            z = self._tables()["z"][1:-1]
            rho, rp, rpp = self.rho(z), self.drho(z), self.d2rho(z)
            k_mer = np.abs(rpp) / (1.0 + rp ** 2) ** 1.5
            k_par = 1.0 / (rho * np.sqrt(1.0 + rp ** 2))
            val = float(max(k_mer.max(), k_par.max()))
            self._cache["kmax"] = val
        return val


def _candidate_derivs(candidate):
    if isinstance(candidate, RevolutionProfile):
        return candidate.name, candidate.params, candidate._d[:4], (
            candidate.a_minus, candidate.a_plus), candidate.rho2_u
    if not isinstance(candidate, dict):
        raise ConfigError(f"profile candidate must be a dict, got {type(candidate)!r}")
    if "preset" in candidate:
        preset = candidate["preset"]
        if preset == "sphere":
            *d, dom, r2 = _sphere_derivs()
            return "sphere", {}, tuple(d), dom, r2
        if preset == "spheroid":
            a, c = float(candidate["a"]), float(candidate["c"])
            if a <= 0 or c <= 0:
                raise ConfigError("spheroid needs a > 0 and c > 0")
            *d, dom, r2 = _spheroid_derivs(a, c)
            return "spheroid", {"a": a, "c": c}, tuple(d), dom, r2
        if preset == "spheroid_bump":
            a, c = float(candidate["a"]), float(candidate["c"])
            eps = float(candidate["eps"])
            *d, dom, r2 = _spheroid_bump_derivs(a, c, eps)
            return "spheroid_bump", {"a": a, "c": c, "eps": eps}, tuple(d), dom, r2
        raise ConfigError(f"unknown profile preset {preset!r}")
    if "poly_even" in candidate:
        coeffs = [float(v) for v in candidate["poly_even"]]
        dom = candidate.get("domain", [-1.0, 1.0])
        *d, dom, r2 = _even_poly_derivs(coeffs, dom)
        return "poly_even", {"poly_even": coeffs, "domain": list(dom)}, tuple(d), dom, r2
    raise ConfigError("profile candidate needs a 'preset' or 'poly_even' entry")


def validate_profile(candidate) -> RevolutionProfile:
    """Check positivity, strict convexity and pole limits; derive equator data.

    Raises ValidationError naming the violated condition and a witness z.
    """
    name, params, derivs, (a_minus, a_plus), rho2_u = _candidate_derivs(candidate)
    if not a_minus < a_plus:
        raise ValidationError(f"domain endpoints must satisfy a- < a+, got ({a_minus}, {a_plus})")
    d0, d1, d2, _ = derivs

    zg = np.linspace(a_minus + ENDPOINT_OFFSET, a_plus - ENDPOINT_OFFSET, CONVEXITY_GRID)
    rho = np.asarray(d0(zg), dtype=float)
    if not np.all(np.isfinite(rho)):
        bad = zg[~np.isfinite(rho)][0]
        raise ValidationError(f"positivity violated: rho not finite at z = {bad}")
    if np.any(rho <= 0.0):
        bad = zg[rho <= 0.0][0]
        raise ValidationError(f"positivity violated: rho(z) <= 0 at z = {bad}")

    rpp = np.asarray(d2(zg), dtype=float)
    if np.any(rpp >= 0.0):
        viol = zg[rpp >= 0.0]
        bad = viol[np.argmin(np.abs(viol))]
        raise ValidationError(f"convexity violated: rho''(z) >= 0 at z = {bad}")

    for side, zc, sign in (("a-", a_minus + ENDPOINT_OFFSET, +1.0),
                           ("a+", a_plus - ENDPOINT_OFFSET, -1.0)):
        r, rp = float(d0(zc)), float(d1(zc))
        if not r < POLE_RHO_MAX:
            raise ValidationError(
                f"pole limit violated at {side}: rho({zc}) = {r} >= {POLE_RHO_MAX}")
        if not sign * rp > POLE_SLOPE_MIN:
            raise ValidationError(
                f"pole limit violated at {side}: rho'({zc}) = {rp}, "
                f"need {'+' if sign > 0 else '-'}|rho'| > {POLE_SLOPE_MIN}")

    # z0 by bisection on rho' (strictly decreasing since rho'' < 0)
    lo, hi = a_minus + ENDPOINT_OFFSET, a_plus - ENDPOINT_OFFSET
    if not (float(d1(lo)) > 0.0 > float(d1(hi))):
        raise ValidationError("pole limit violated: rho' does not change sign on the interior")
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if float(d1(mid)) > 0.0:
            lo = mid
        else:
            hi = mid
    z0 = 0.5 * (lo + hi)
    rho_max = float(d0(z0))
    return RevolutionProfile(name=name, params=params, a_minus=a_minus, a_plus=a_plus,
                             z0=z0, rho_max=rho_max,
                             equator_length=2.0 * math.pi * rho_max, _d=derivs,
                             rho2_u=rho2_u)


def profile_descriptor(profile: RevolutionProfile) -> dict:
    if profile.name == "poly_even":
        return dict(profile.params)
    return {"preset": profile.name, **profile.params}


# ---------------------------------------------------------------------------
# Clairaut constant
# ---------------------------------------------------------------------------

def clairaut_constant(profile: RevolutionProfile, state: PhaseState) -> float:
    """rho(z)*cos(alpha) for a surface state; equals xi_phi at unit speed."""
    if state.momentum.shape != (2,):
        raise ConfigError("clairaut_constant needs a surface state (xi_z, xi_phi)")
    if state.energy <= 0:
        raise ConfigError("state must have positive energy")
    return float(state.momentum[1] / state.energy)


# ---------------------------------------------------------------------------
# return maps via turning-point quadrature
# ---------------------------------------------------------------------------

def _turning_point_scalar(profile, c):
    f = lambda z: float(profile.rho(z)) - c
    hi = profile.a_plus - 1e-13 * profile.span
    return brentq(f, profile.z0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def _turning_points_vec(profile, c):
    """Vectorized bisection for rho(z) = c on (z0, a+)."""
    c = np.asarray(c, dtype=float)
    lo = np.full(c.shape, profile.z0)
    hi = np.full(c.shape, profile.a_plus - 1e-13 * profile.span)
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        above = profile.rho(mid) > c
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return 0.5 * (lo + hi)


def _meridian_tau(profile):
    val = profile._cache.get("meridian_tau")
    if val is None:
        val = 2.0 * (profile.meridian_length - float(profile.arc_from_z(profile.z0)))
        profile._cache["meridian_tau"] = val
    return val


def _require_even(profile):
    if abs(profile.z0) > 1e-9 * max(1.0, profile.span) or \
            abs(profile.a_plus + profile.a_minus) > 1e-9 * max(1.0, profile.span):
        raise ConfigError("return-map quadrature assumes an even profile (z0 = 0)")


def _psi_integrand_factors(profile, c, zp, psi):
    """Common factors of the swing integrals under z = z+ * sin(psi).

    With both turning points at +-z+ (even profile), rho^2 - c^2 factors as
    (z+^2 - z^2) * H with H = (P(u) - P(v)) / (v - u) for u = z^2, v = z+^2
    and P the polynomial with rho^2 = P(z^2).  The divided difference is a
    positive-coefficient sum, so H is cancellation-free right up to the
    turning point.  Returns (rho, sqrt(1+rho'^2), sqrt(H)).
    """
    sinp = np.sin(psi)
    z = zp * sinp
    rho = profile.rho(z)
    rp = profile.drho(z)
    u = z * z
    v = np.broadcast_to(np.asarray(zp * zp), np.shape(u)) if np.ndim(u) else zp * zp
    coeffs = profile.rho2_u
    # s_k = (v^k - u^k)/(v - u), built by s_{k+1} = v s_k + u^k
    H = np.zeros(np.shape(u))
    s_k = np.ones(np.shape(u))
    u_pow = np.ones(np.shape(u))
    for k in range(1, len(coeffs)):
        H = H - coeffs[k] * s_k
        u_pow = u_pow * u
        s_k = v * s_k + u_pow
    H = np.maximum(H, 1e-300)
    return rho, np.sqrt(1.0 + rp * rp), np.sqrt(H)


def _half_swing_integrals_scalar(profile, c, zp=None):
    """(delta_phi, tau) for one equator-to-equator half swing, constant c > 0.

    Adaptive quadrature in the turning-point angle psi; this is the
    oracle-grade evaluator.
    """
    _require_even(profile)
    if zp is None:
        zp = _turning_point_scalar(profile, c)

    def integrands(psi):
        rho, s, rootH = _psi_integrand_factors(profile, c, zp, np.asarray(psi))
        return float(c * s / (rho * rootH)), float(rho * s / rootH)

    import warnings as _warnings
    with _warnings.catch_warnings():
        _warnings.simplefilter("ignore")
        phi, _ = quad(lambda p: integrands(p)[0], 0.0, 0.5 * math.pi,
                      epsabs=1e-12, epsrel=1e-12, limit=400)
        tau, _ = quad(lambda p: integrands(p)[1], 0.0, 0.5 * math.pi,
                      epsabs=1e-12, epsrel=1e-12, limit=400)
    # the swing covers [z0, z+] twice: up to the turning point and back
    return 2.0 * phi, 2.0 * tau


def _half_swing_integrals_vec(profile, c, chunk=8192):
    """Vectorized (delta_phi, tau) on panelized Gauss nodes in psi.

    Panels refine geometrically toward psi = pi/2 to resolve the near-pole
    rotation spike of almost-meridian constants; agrees with the scalar
    adaptive evaluator to ~1e-10.
    """
    _require_even(profile)
    c = np.asarray(c, dtype=float)
    out_phi = np.empty(c.shape)
    out_tau = np.empty(c.shape)

    n_panels = 26
    # gaps from pi/2, geometric: pi/2 * [1, 1/2, ..., ~4e-8, 0]
    gaps = 0.5 * math.pi * np.concatenate([0.5 ** np.arange(n_panels), [0.0]])
    edges = 0.5 * math.pi - gaps          # ascending toward pi/2
    lo = edges[:-1]
    hi = edges[1:]
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    psi = (mid[:, None] + half[:, None] * _GLX[None, :]).ravel()
    wts = (half[:, None] * _GLW[None, :]).ravel()

    for start in range(0, c.size, chunk):
        cc = c[start:start + chunk]
        zp = _turning_points_vec(profile, cc)
        rho, s, rootH = _psi_integrand_factors(
            profile, cc[:, None], zp[:, None], psi[None, :])
        f_phi = cc[:, None] * s / (rho * rootH)
        f_tau = rho * s / rootH
        out_phi[start:start + chunk] = 2.0 * (f_phi * wts[None, :]).sum(axis=1)
        out_tau[start:start + chunk] = 2.0 * (f_tau * wts[None, :]).sum(axis=1)
    return out_phi, out_tau


def _stable_c(profile, alpha):
    """(c, |c|, rho_max - |c|) with the small difference formed stably."""
    c = profile.rho_max * math.cos(alpha)
    half = 0.5 * min(alpha, math.pi - alpha)
    dc = 2.0 * profile.rho_max * math.sin(half) ** 2
    return c, profile.rho_max - dc, dc


def return_map_quadrature(profile: RevolutionProfile, alpha: float):
    """(theta mod 2pi, tau) for launch angle alpha, via adaptive quadrature.

    Independent of the Hamilton integrator; used to audit ``first_return``.
    """
    if not 0.0 < alpha < math.pi:
        raise ConfigError("alpha must lie in (0, pi)")
    c, cabs, dc = _stable_c(profile, alpha)
    if cabs < profile.c_floor:
        return math.pi, _meridian_tau(profile)
    phi, tau = _half_swing_integrals_scalar(profile, cabs)
    theta = phi if c > 0 else -phi
    return theta % (2.0 * math.pi), tau


def _swing_of_c(profile, c, cabs):
    """Continuous-branch (theta, tau) for signed Clairaut constants."""
    theta = np.full(np.shape(c), math.pi)
    tau = np.full(np.shape(c), _meridian_tau(profile))
    mask = cabs >= profile.c_floor
    if np.any(mask):
        phi, tt = _half_swing_integrals_vec(profile, cabs[mask])
        theta[mask] = np.where(np.asarray(c)[mask] > 0, phi, 2.0 * math.pi - phi)
        tau[mask] = tt
    return theta, tau


def return_map_grid(profile: RevolutionProfile, alphas):
    """Vectorized (theta_cont, tau) over launch angles.

    ``theta_cont`` is a continuous branch of the rotation angle (no mod-2pi
    wraps) so finite differences in alpha are meaningful; reduce mod 2pi for
    reporting.
    """
    alphas = np.asarray(alphas, dtype=float)
    if np.any((alphas <= 0.0) | (alphas >= math.pi)):
        raise ConfigError("alphas must lie strictly inside (0, pi)")
    c = profile.rho_max * np.cos(alphas)
    dc = 2.0 * profile.rho_max * np.sin(0.5 * np.minimum(alphas, math.pi - alphas)) ** 2
    cabs = profile.rho_max - dc
    return _swing_of_c(profile, c, cabs)


@dataclass(frozen=True)
class ReturnMapSample:
    xi: float          # launch angle alpha on the cosphere circle
    tau: float         # first return time
    theta: float       # equator rotation angle, reported mod 2pi
    clairaut: float    # rho_max * cos(alpha)


def first_return(profile: RevolutionProfile, alpha: float,
                 time_budget: float = 1e3) -> ReturnMapSample:
    """Integrate the geodesic from the equator until it re-crosses z = z0.

    The crossing time is located by bisection on the z(t) - z0 sign change to
    1e-10; theta is the phi advance at that time, mod 2pi.
    """
    if not 0.0 < alpha < math.pi:
        raise ConfigError("alpha must lie in (0, pi)")
    if min(alpha, math.pi - alpha) < 1e-4:
        raise ConfigError("alpha must stay 1e-4 away from the endpoints {0, pi}")
    c = profile.rho_max * math.cos(alpha)
    if abs(c) < profile.c_floor:
        return ReturnMapSample(xi=alpha, tau=_meridian_tau(profile),
                               theta=math.pi, clairaut=c)

    from .models import SurfaceOfRevolution  # deferred: models builds on this module

    model = profile._cache.get("model")
    if model is None:
        model = SurfaceOfRevolution(profile)
        profile._cache["model"] = model

    z0 = profile.z0
    state = model.equator_state(alpha)
    chunk = 2.0 * (_meridian_tau(profile)
                   + math.pi * math.sqrt(profile.rho_max
                                         / abs(float(profile.d2rho(profile.z0)))))
    t_done = 0.0
    while t_done < time_budget:
        t_next = min(t_done + chunk, time_budget)
        sol = model._integrate(state, t_next, dense=True)
        ts, zs = sol["t_grid"], sol["z_grid"]
        inside = ts > 1e-9
        below = np.nonzero(inside[1:] & ((zs[1:] - z0) < 0.0))[0]
        if below.size:
            i = below[0]
            lo, hi = ts[i], ts[i + 1]
            dense = sol["dense"]
            while hi - lo > 1e-10:
                mid = 0.5 * (lo + hi)
                if dense(mid)[0] - z0 > 0.0:
                    lo = mid
                else:
                    hi = mid
            t_ret = 0.5 * (lo + hi)
            phi_ret = dense(t_ret)[1]
            return ReturnMapSample(xi=alpha, tau=float(t_ret),
                                   theta=float(phi_ret % (2.0 * math.pi)), clairaut=c)
        t_done = t_next
    raise NoReturnError(f"no equator crossing within time budget {time_budget}")


# ---------------------------------------------------------------------------
# order of vanishing of the return angle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VanishingOrder:
    r: int
    worst_alpha: float
    degenerate: bool


def vanishing_order(profile: RevolutionProfile, grid_size: int = 2048,
                    alpha_margin: float = 0.01,
                    theta_abs_err: float = 1e-9) -> VanishingOrder:
    """Estimate the maximal vanishing order r of the return angle.

    Samples theta(alpha), takes central differences, and classifies each zero
    of theta' by a local polynomial fit (degree <= 6).  Zeros are only
    trusted above a noise floor of 10x the estimated finite-difference error.
    """
    if grid_size < 1000:
        raise ConfigError("grid_size must be at least 10^3")
    alphas = np.linspace(alpha_margin, math.pi - alpha_margin, grid_size)
    theta, _ = return_map_grid(profile, alphas)
    h = alphas[1] - alphas[0]

    spread = float(theta.max() - theta.min())
    if spread <= 1e-8:
        return VanishingOrder(r=0, worst_alpha=float("nan"), degenerate=True)

    dth = (theta[2:] - theta[:-2]) / (2.0 * h)
    scale = max(1.0, float(np.abs(theta).max()))
    noise_floor = 10.0 * (theta_abs_err / h + np.finfo(float).eps * scale / h)

    small = np.abs(dth) <= noise_floor
    signchg = np.sign(dth[:-1]) * np.sign(dth[1:]) < 0
    if not small.any() and not signchg.any():
        imin = int(np.argmin(np.abs(dth)))
        return VanishingOrder(r=1, worst_alpha=float(alphas[1 + imin]), degenerate=False)

    # locate zero clusters of theta': sign changes or sub-floor runs
    cand = np.zeros(dth.size, dtype=bool)
    cand |= small
    cand[:-1] |= signchg
    idx = np.nonzero(cand)[0]
    clusters = []
    start = idx[0]
    prev = idx[0]
    for i in idx[1:]:
        if i - prev > 1:
            clusters.append((start, prev))
            start = i
        prev = i
    clusters.append((start, prev))
    centers = [int((a + b) // 2) + 1 for a, b in clusters]

    for c1, c2 in zip(centers, centers[1:]):
        if c2 - c1 < 4:
            raise ResolutionError(
                f"two zeros of theta' within {c2 - c1} grid steps near alpha = "
                f"{alphas[c1]}; refine the grid")

    r_best, alpha_best = 1, float("nan")
    halfwin = max(8, grid_size // 128)
    for ci in centers:
        # refine the zero of theta' by secant across the cluster, so the fit
        # center does not leak a spurious linear term
        a_star = alphas[ci]
        j0 = max(1, min(ci - 1, dth.size - 2))
        for j in range(max(1, ci - 3), min(dth.size - 1, ci + 3)):
            if dth[j - 1] * dth[j] < 0:
                frac = dth[j - 1] / (dth[j - 1] - dth[j])
                a_star = alphas[j] + frac * h
                break
        lo = max(0, ci - halfwin)
        hi = min(grid_size, ci + halfwin + 1)
        x = alphas[lo:hi] - a_star
        y = theta[lo:hi]
        deg = min(6, x.size - 2)
        V = np.vander(x, deg + 1, increasing=True)
        coef, *_ = np.linalg.lstsq(V, y, rcond=None)
        resid = float(np.sqrt(np.mean((V @ coef - y) ** 2)))
        width = float(np.abs(x).max())
        terms = np.array([abs(coef[j]) * width ** j for j in range(1, deg + 1)])
        dominant = float(terms.max())
        tol = max(10.0 * max(resid, theta_abs_err), 1e-3 * dominant)
        order = None
        for j in range(1, deg + 1):
            if terms[j - 1] > tol:
                order = j
                break
        if order is None:
            raise ResolutionError(
                f"cannot classify the zero of theta' at alpha = {alphas[ci]}; "
                "all fitted derivatives are below the noise floor")
        if order > r_best:
            r_best, alpha_best = order, float(a_star)
    if r_best == 1:
        imin = int(np.argmin(np.abs(dth)))
        alpha_best = float(alphas[1 + imin])
    return VanishingOrder(r=r_best, worst_alpha=alpha_best, degenerate=False)


# ---------------------------------------------------------------------------
# rational-approximation recurrence measure on the cosphere circle
# ---------------------------------------------------------------------------

def return_rate_bound(profile: RevolutionProfile, grid_size: int = 2048,
                      alpha_margin: float = 1e-3) -> float:
    """Measured bound on equator returns per unit time: 1 / min tau."""
    alphas = np.linspace(alpha_margin, math.pi - alpha_margin, grid_size)
    _, tau = return_map_grid(profile, alphas)
    tmin = float(tau.min())
    if tmin <= 0:
        raise NumericalError("return-time grid produced a nonpositive tau")
    return 1.0 / tmin


def rational_recurrence_measure(profile: RevolutionProfile, T: float, eps: float,
                                rate_bound: float | None = None,
                                grid_size: int = 4096,
                                alpha_margin: float = 1e-3) -> float:
    """Measure of launch directions whose normalized return angle is ~rational.

    Sweeps the monotone pieces of theta/2pi and unions the preimages of the
    intervals |x - q/p| <= eps/p over 1 <= p <= rate_bound*T.  Directions are
    measured by the Clairaut parameter c = rho_max*cos(alpha) (the smooth
    nondegenerate fiber coordinate; the raw angle measure would see the
    forced quadratic flattening of theta(alpha) at the equatorial directions
    and break the vanishing-order scaling).
    """
    if T <= 0:
        raise ConfigError("T must be positive")
    if not 0.0 < eps < 1.0:
        raise ConfigError("eps must lie in (0, 1)")
    if rate_bound is None:
        rate_bound = return_rate_bound(profile, grid_size=min(grid_size, 2048),
                                       alpha_margin=alpha_margin)
    pmax = int(math.floor(rate_bound * T))
    if pmax < 1:
        return 0.0

    c_hi = profile.rho_max * math.cos(alpha_margin)
    cs = np.linspace(-c_hi, c_hi, grid_size)
    theta, _ = _swing_of_c(profile, cs, np.abs(cs))
    x = theta / (2.0 * math.pi)

    # split into monotone pieces
    d = np.diff(x)
    sign = np.sign(d)
    breaks = [0]
    cur = 0.0
    for i, s in enumerate(sign):
        if s != 0.0 and cur != 0.0 and s != cur:
            breaks.append(i)
            cur = s
        elif s != 0.0 and cur == 0.0:
            cur = s
    breaks.append(len(x) - 1)

    intervals = []
    for b0, b1 in zip(breaks[:-1], breaks[1:]):
        if b1 <= b0:
            continue
        xa, cb = x[b0:b1 + 1], cs[b0:b1 + 1]
        increasing = xa[-1] >= xa[0]
        xs = xa if increasing else xa[::-1]
        cl = cb if increasing else cb[::-1]
        # enforce strict monotonicity for interpolation
        xs = np.maximum.accumulate(xs)
        x_lo, x_hi = xs[0], xs[-1]
        for p in range(1, pmax + 1):
            w = eps / p
            q0 = int(math.floor(p * x_lo - eps)) - 1
            q1 = int(math.ceil(p * x_hi + eps)) + 1
            for q in range(q0, q1 + 1):
                t_lo = max(q / p - w, x_lo)
                t_hi = min(q / p + w, x_hi)
                if t_hi <= t_lo:
                    continue
                a_lo = float(np.interp(t_lo, xs, cl))
                a_hi = float(np.interp(t_hi, xs, cl))
                if a_hi < a_lo:
                    a_lo, a_hi = a_hi, a_lo
                intervals.append((a_lo, a_hi))

    if not intervals:
        return 0.0
    intervals.sort()
    total = 0.0
    cur_lo, cur_hi = intervals[0]
    for lo2, hi2 in intervals[1:]:
        if lo2 > cur_hi:
            total += cur_hi - cur_lo
            cur_lo, cur_hi = lo2, hi2
        else:
            cur_hi = max(cur_hi, hi2)
    total += cur_hi - cur_lo
    return total


def sweep_domain_length(profile: RevolutionProfile, alpha_margin: float = 1e-3) -> float:
    """Total Clairaut-parameter measure of the swept direction domain."""
    return 2.0 * profile.rho_max * math.cos(alpha_margin)
