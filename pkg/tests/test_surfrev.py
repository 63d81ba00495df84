import math

import numpy as np
import pytest

from weyllab import (ConfigError, ResolutionError, ValidationError,
                     clairaut_constant, first_return,
                     rational_recurrence_measure, return_map_grid,
                     return_map_quadrature, validate_profile, vanishing_order)
from weyllab.models import SurfaceOfRevolution
from weyllab.surfrev import return_rate_bound, sweep_domain_length

from oracles import dense_rational_measure

TWO_PI = 2.0 * math.pi


# -- profile validation --------------------------------------------------------

def test_sphere_preset_valid(sphere_profile):
    assert sphere_profile.z0 == pytest.approx(0.0, abs=1e-9)
    assert sphere_profile.rho_max == pytest.approx(1.0, abs=1e-12)
    assert sphere_profile.equator_length == pytest.approx(TWO_PI, abs=1e-10)


def test_spheroid_preset_valid(spheroid_profile):
    assert spheroid_profile.z0 == pytest.approx(0.0, abs=1e-9)
    assert spheroid_profile.rho_max == pytest.approx(1.0, abs=1e-12)
    assert spheroid_profile.a_plus == 2.0


def test_flat_equator_poly_rejected():
    # rho = 1 - z^4 has rho''(0) = 0: strict convexity fails at z = 0
    with pytest.raises(ValidationError, match="convexity") as exc:
        validate_profile({"poly_even": [1.0, 0.0, -1.0], "domain": [-1.0, 1.0]})
    assert "z = " in str(exc.value)
    witness = float(str(exc.value).split("z = ")[1])
    assert abs(witness) < 1e-3


def test_pole_limit_rejected():
    # positive polynomial with finite slope at the endpoints
    with pytest.raises(ValidationError, match="pole"):
        validate_profile({"poly_even": [1.0, -0.5], "domain": [-1.0, 1.0]})


def test_spec_nominal_bump_amplitude_breaks_convexity():
    # the 0.05 z^4 bump on spheroid(1,2) is too strong to stay strictly convex
    with pytest.raises(ValidationError, match="convexity"):
        validate_profile({"preset": "spheroid_bump", "a": 1.0, "c": 2.0,
                          "eps": 0.05})


def test_unknown_preset_rejected():
    with pytest.raises(ConfigError):
        validate_profile({"preset": "torus"})


# -- Clairaut constant ---------------------------------------------------------

def test_clairaut_meridian_zero(spheroid_profile):
    model = SurfaceOfRevolution(spheroid_profile)
    s = model.equator_state(math.pi / 2)
    assert clairaut_constant(spheroid_profile, s) == pytest.approx(0.0, abs=1e-12)


def test_clairaut_equatorial_max(spheroid_profile):
    model = SurfaceOfRevolution(spheroid_profile)
    s = model.state_from_angles(spheroid_profile.z0, 0.0, 0.0)   # along the equator
    assert clairaut_constant(spheroid_profile, s) == pytest.approx(
        spheroid_profile.rho_max, abs=1e-12)


def test_clairaut_conserved_along_flow(spheroid_profile):
    model = SurfaceOfRevolution(spheroid_profile)
    s = model.equator_state(math.pi / 3)
    assert clairaut_constant(spheroid_profile, s) == pytest.approx(0.5, abs=1e-12)
    out = model.flow(s, 50.0)
    assert clairaut_constant(spheroid_profile, out) == pytest.approx(0.5, abs=1e-8)


# -- first return ---------------------------------------------------------------

def test_sphere_return_map(sphere_profile):
    for alpha in (0.4, 1.1, 2.0):
        smp = first_return(sphere_profile, alpha)
        assert smp.theta == pytest.approx(math.pi, abs=1e-6)
        assert smp.tau == pytest.approx(math.pi, abs=1e-6)


def test_spheroid_meridian_planar(spheroid_profile):
    smp = first_return(spheroid_profile, math.pi / 2)
    assert smp.theta == pytest.approx(math.pi, abs=1e-6)


def test_spheroid_quadrature_cross_check(spheroid_profile):
    for alpha in (math.pi / 3, 0.8, 2.2):
        smp = first_return(spheroid_profile, alpha)
        theta_q, tau_q = return_map_quadrature(spheroid_profile, alpha)
        assert smp.theta == pytest.approx(theta_q, abs=1e-6)
        assert smp.tau == pytest.approx(tau_q, abs=1e-6)
        assert smp.clairaut == pytest.approx(
            spheroid_profile.rho_max * math.cos(alpha), abs=1e-12)


def test_first_return_rejects_extreme_angles(spheroid_profile):
    with pytest.raises(ConfigError):
        first_return(spheroid_profile, 1e-5)
    with pytest.raises(ConfigError):
        first_return(spheroid_profile, math.pi - 1e-5)


def test_first_return_time_budget_guard(spheroid_profile):
    from weyllab.surfrev import NoReturnError
    with pytest.raises(NoReturnError):
        first_return(spheroid_profile, 1.0, time_budget=0.5)


def test_base_point_invariance(spheroid_profile):
    # rotational symmetry: launching from another equator point gives the
    # same return data; run the flow directly from a rotated base point
    model = SurfaceOfRevolution(spheroid_profile)
    alpha = 1.1
    smp = first_return(spheroid_profile, alpha)
    phi0 = 1.2345
    s = model.state_from_angles(spheroid_profile.z0, phi0, 0.0)
    xi_phi = spheroid_profile.rho_max * math.cos(alpha)
    xi_z = math.sqrt(1.0 + float(spheroid_profile.drho(spheroid_profile.z0)) ** 2) \
        * math.sin(alpha)
    from weyllab import PhaseState
    s = model.make_state(np.array([spheroid_profile.z0, phi0]),
                         np.array([xi_z, xi_phi]))
    out = model.flow(s, smp.tau)
    assert out.position[0] == pytest.approx(spheroid_profile.z0, abs=1e-8)
    theta_from_phi0 = (out.position[1] - phi0) % TWO_PI
    assert theta_from_phi0 == pytest.approx(smp.theta, abs=1e-9)


def test_return_time_bounded(spheroid_profile):
    alphas = np.linspace(0.05, math.pi - 0.05, 400)
    _, tau = return_map_grid(spheroid_profile, alphas)
    assert tau.max() < 10.0
    assert tau.min() > 1.0


# -- vanishing order -------------------------------------------------------------

def test_sphere_degenerate(sphere_profile):
    vo = vanishing_order(sphere_profile, 2048)
    assert vo.degenerate


def test_spheroid_order_one(spheroid_profile):
    vo = vanishing_order(spheroid_profile, 2048)
    assert not vo.degenerate
    assert vo.r == 1


def test_spheroid_dense_scan_oracle(spheroid_profile):
    # min |theta'| over a 10^6 scan stays well above the finite-difference
    # noise floor: no interior zero exists
    alphas = np.linspace(0.01, math.pi - 0.01, 1_000_000)
    theta, _ = return_map_grid(spheroid_profile, alphas)
    h = alphas[1] - alphas[0]
    dth = (theta[2:] - theta[:-2]) / (2.0 * h)
    assert np.abs(dth).min() > 1e-2


def test_bump_order_two(bump_profile):
    vo = vanishing_order(bump_profile, 4096)
    assert vo.r == 2
    assert not vo.degenerate
    # dense scan + local fit oracle: theta' changes sign at a simple zero
    alphas = np.linspace(0.01, math.pi - 0.01, 200_001)
    theta, _ = return_map_grid(bump_profile, alphas)
    dth = np.gradient(theta, alphas)
    signchg = np.nonzero(np.sign(dth[:-1]) * np.sign(dth[1:]) < 0)[0]
    assert signchg.size == 2          # one zero and its mirror
    i = signchg[0]
    a0 = alphas[i]
    assert abs(a0 - vo.worst_alpha) < 1e-2 or abs(
        (math.pi - a0) - vo.worst_alpha) < 1e-2
    w = (alphas > a0 - 0.08) & (alphas < a0 + 0.08)
    co = np.polyfit(alphas[w] - a0, theta[w] - theta[i], 3)
    # quadratic term dominates the linear one over the window
    assert abs(co[-2]) * 0.08 < 0.05 * abs(co[-3]) * 0.08 ** 2 + 1e-6


def test_vanishing_order_grid_too_small(spheroid_profile):
    with pytest.raises(ConfigError):
        vanishing_order(spheroid_profile, 100)


def test_resolution_error_on_adjacent_zeros(monkeypatch, spheroid_profile):
    # synthetic theta with two zeros of theta' closer than 4 grid steps
    def fake_grid(profile, alphas):
        a = np.asarray(alphas)
        h = a[1] - a[0]
        center = a[a.size // 2]
        theta = 4.0 + np.sin((a - center) * (2.0 * math.pi / (3.0 * h)))* 1e-3 + 0.5 * (a - center)**3
        return theta, np.full(a.shape, 5.0)

    import weyllab.surfrev as sr
    monkeypatch.setattr(sr, "return_map_grid", fake_grid)
    with pytest.raises(ResolutionError):
        sr.vanishing_order(spheroid_profile, 2048)


# -- rational recurrence measure --------------------------------------------------

@pytest.fixture(scope="module")
def spheroid_rate(spheroid_profile):
    return return_rate_bound(spheroid_profile)


def test_measure_empty_below_first_return(spheroid_profile, spheroid_rate):
    assert rational_recurrence_measure(spheroid_profile, 0.9 / spheroid_rate, 0.1,
                                       rate_bound=spheroid_rate) == 0.0


def test_measure_full_at_half(spheroid_profile, spheroid_rate):
    got = rational_recurrence_measure(spheroid_profile, 1.5 / spheroid_rate, 0.6,
                                      rate_bound=spheroid_rate)
    assert got == pytest.approx(sweep_domain_length(spheroid_profile), rel=1e-12)


def test_measure_slope_near_one(spheroid_profile, spheroid_rate):
    eps_list = [2.0 ** (-k) for k in range(4, 10)]
    ms = [rational_recurrence_measure(spheroid_profile, 20.0, e,
                                      rate_bound=spheroid_rate)
          for e in eps_list]
    slope = np.polyfit(np.log(eps_list), np.log(ms), 1)[0]
    assert slope == pytest.approx(1.0, abs=0.1)


def test_measure_matches_dense_sweep_oracle(spheroid_profile, spheroid_rate):
    for eps in (2.0 ** -5, 2.0 ** -7):
        got = rational_recurrence_measure(spheroid_profile, 20.0, eps,
                                          rate_bound=spheroid_rate)
        want = dense_rational_measure(spheroid_profile, 20.0, eps, spheroid_rate,
                                      n=1_000_000)
        assert got == pytest.approx(want, rel=2e-2)


def test_measure_monotone(spheroid_profile, spheroid_rate):
    m = {}
    for T in (10.0, 20.0):
        for eps in (0.01, 0.02):
            m[(T, eps)] = rational_recurrence_measure(
                spheroid_profile, T, eps, rate_bound=spheroid_rate)
    assert m[(10.0, 0.01)] <= m[(20.0, 0.01)]
    assert m[(20.0, 0.01)] <= m[(20.0, 0.02)]


def test_measure_vanishing_order_bound(spheroid_profile, spheroid_rate):
    # Thm-shape bound C * eps^(1/r) * T^(1-1/r) with r = 1; C anchored at
    # (T_max, eps_min) where the weakly superlinear eps-dependence peaks
    eps_list = [2.0 ** (-k) for k in range(4, 9)]
    t_list = [10.0, 20.0, 40.0]
    vals = {(T, e): rational_recurrence_measure(spheroid_profile, T, e,
                                                rate_bound=spheroid_rate)
            for T in t_list for e in eps_list}
    C = vals[(40.0, eps_list[-1])] / eps_list[-1]
    for (T, e), v in vals.items():
        assert v <= C * e * (1.0 + 1e-9)


# -- quadrature internals ---------------------------------------------------------

def test_scalar_vs_vector_quadrature(spheroid_profile):
    for alpha in (1e-4, 0.02, 0.7, 1.4, 1.5707, 2.5, math.pi - 1e-4):
        th_s, tau_s = return_map_quadrature(spheroid_profile, alpha)
        th_v, tau_v = return_map_grid(spheroid_profile, np.array([alpha]))
        assert abs(math.remainder(th_s - th_v[0], TWO_PI)) < 1e-8
        assert tau_s == pytest.approx(tau_v[0], abs=1e-8)


def test_sphere_quadrature_exact(sphere_profile):
    alphas = np.linspace(1e-4, math.pi - 1e-4, 2001)
    theta, tau = return_map_grid(sphere_profile, alphas)
    assert np.abs(theta - math.pi).max() < 1e-6
    assert np.abs(tau - math.pi).max() < 1e-6
