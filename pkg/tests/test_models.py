import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weyllab import (CatMapSuspension, FlatTorus, PhaseState, Sphere3,
                     SurfaceOfRevolution, ValidationError, model_from_config,
                     substream)

from oracles import exact_det, rk4_surface_orbit

TWO_PI = 2.0 * math.pi


@pytest.fixture(scope="module")
def torus2():
    return FlatTorus(2)


@pytest.fixture(scope="module")
def catmap():
    return CatMapSuspension()


@pytest.fixture(scope="module")
def sphere3():
    return Sphere3()


@pytest.fixture(scope="module")
def spheroid_model(spheroid_profile):
    return SurfaceOfRevolution(spheroid_profile)


def all_models(torus2, catmap, sphere3, spheroid_model):
    return [torus2, catmap, sphere3, spheroid_model]


# -- construction invariants -------------------------------------------------

def test_catmap_rejects_bad_matrix():
    with pytest.raises(ValidationError):
        CatMapSuspension(matrix=((2, 1), (1, 0)))      # det 1? trace 2 -> not hyperbolic
    with pytest.raises(ValidationError):
        CatMapSuspension(matrix=((1, 0), (0, 1)))      # trace 2
    with pytest.raises(ValidationError):
        CatMapSuspension(matrix=((2, 0), (0, 2)))      # det 4


def test_torus_rejects_singular_basis():
    with pytest.raises(ValidationError):
        FlatTorus(2, basis=[[1.0, 1.0], [2.0, 2.0]])


def test_default_periods(torus2, catmap, sphere3, spheroid_model):
    assert torus2.t0 == pytest.approx(TWO_PI)
    assert catmap.t0 == 1.0
    assert sphere3.t0 == pytest.approx(TWO_PI)
    assert spheroid_model.t0 == pytest.approx(TWO_PI)   # equator length, rho_max = 1


def test_model_from_config_roundtrip(torus2, catmap, sphere3, spheroid_model):
    for model in (torus2, catmap, sphere3, spheroid_model):
        clone = model_from_config(model.descriptor())
        assert clone.label == model.label
        assert clone.t0 == pytest.approx(model.t0)


# -- flow examples -----------------------------------------------------------

def test_torus_closed_orbit(torus2):
    s = torus2.make_state([0.0, 0.0], [1.0, 0.0])
    out = torus2.flow(s, TWO_PI)
    assert np.allclose(out.position, [0.0, 0.0], atol=1e-12)
    assert np.array_equal(out.momentum, s.momentum)


def test_catmap_origin_fixed(catmap):
    s = catmap.make_state([0.0, 0.0, 0.0])
    out = catmap.flow(s, 5.0)
    assert np.array_equal(out.position, np.array([0.0, 0.0, 0.0]))


def test_sphere3_periodicity_exact(sphere3):
    st_ = sphere3.liouville_sample(substream(1, 0))
    out = sphere3.flow(st_, TWO_PI)
    assert np.allclose(out.position, st_.position, atol=1e-15)
    assert np.allclose(out.momentum, st_.momentum, atol=1e-15)


def test_spheroid_clairaut_conserved(spheroid_model):
    s = spheroid_model.equator_state(math.pi / 3)
    assert s.momentum[1] == pytest.approx(0.5, abs=1e-12)
    out = spheroid_model.flow(s, 50.0)
    c_end = out.momentum[1] / out.energy
    assert abs(c_end - 0.5) <= 1e-8


def test_spheroid_flow_matches_rk4_reference(spheroid_model, spheroid_profile):
    # independent fixed-step reference at 10x the adaptive step resolution
    s = spheroid_model.equator_state(math.pi / 3)
    t = 5.0
    out = spheroid_model.flow(s, t)
    z, phi, xi_z, xi_phi = rk4_surface_orbit(
        spheroid_profile, s.position[0], s.position[1], s.momentum[0],
        s.momentum[1], t, 200_000)
    assert out.position[0] == pytest.approx(z, abs=1e-8)
    assert out.position[1] % TWO_PI == pytest.approx(phi % TWO_PI, abs=1e-8)
    assert out.momentum[0] == pytest.approx(xi_z, abs=1e-8)


def test_meridian_flow_through_pole(spheroid_model):
    s = spheroid_model.equator_state(math.pi / 2)
    assert abs(s.momentum[1]) < 1e-15
    half = spheroid_model.flow(s, 0.5 * 2.0 * (spheroid_model.profile.meridian_length
                                               - spheroid_model.profile.arc_from_z(0.0)))
    # half the first-return time: at the pole-adjacent symmetric point
    out = spheroid_model.flow(s, 2.0 * (spheroid_model.profile.meridian_length
                                        - spheroid_model.profile.arc_from_z(0.0)))
    assert out.position[0] == pytest.approx(0.0, abs=1e-9)
    assert out.position[1] % TWO_PI == pytest.approx(math.pi, abs=1e-9)
    assert half.position[0] > 0.0


# -- tangent flow ------------------------------------------------------------

def test_tangent_identity_at_zero(torus2, catmap, sphere3, spheroid_model):
    for model in all_models(torus2, catmap, sphere3, spheroid_model):
        st_ = model.liouville_sample(substream(5, 3))
        J = model.tangent_flow(st_, 0.0)
        assert np.allclose(J, np.eye(model.dim_level), atol=1e-12)


def test_torus_tangent_linear_growth(torus2):
    s = torus2.make_state([0.3, 1.1], [0.6, 0.8])
    J = torus2.tangent_flow(s, 10.0)
    assert np.linalg.norm(J, 2) == pytest.approx(math.sqrt(1 + 100.0), rel=1e-2)
    assert np.linalg.det(J) == pytest.approx(1.0, abs=1e-12)


def test_catmap_tangent_integer_power(catmap):
    s = catmap.make_state([0.3, 0.7, 0.0])
    for n in (1, 3, 7):
        J = catmap.tangent_flow(s, float(n))
        A = np.array([[2.0, 1.0], [1.0, 1.0]])
        assert np.array_equal(J[:2, :2], np.linalg.matrix_power(A, n))
        assert J[2, 2] == 1.0


@pytest.mark.parametrize("t", [1.0, 5.0, 20.0])
def test_volume_preservation(torus2, catmap, sphere3, spheroid_model, t):
    # exact rational determinant: float LU would lose the huge-entry cat-map
    # Jacobians to cancellation even though their determinant is exactly 1
    for model in all_models(torus2, catmap, sphere3, spheroid_model):
        st_ = model.liouville_sample(substream(9, 1))
        J = model.tangent_flow(st_, t)
        assert abs(exact_det(J) - 1.0) <= 1e-6


# -- distance ----------------------------------------------------------------

def test_distance_zero_on_self(torus2, catmap, sphere3, spheroid_model):
    for model in all_models(torus2, catmap, sphere3, spheroid_model):
        st_ = model.liouville_sample(substream(2, 7))
        assert model.distance(st_, st_) == pytest.approx(0.0, abs=1e-12)


def test_torus_wraparound_distance(torus2):
    s1 = torus2.make_state([0.0, 0.0], [1.0, 0.0])
    s2 = torus2.make_state([TWO_PI - 0.1, 0.0], [1.0, 0.0])
    assert torus2.distance(s1, s2) == pytest.approx(0.1, abs=1e-12)


def test_sphere3_antipodal_distance(sphere3):
    # great-circle arc between antipodes is pi; transported direction equal
    x = np.array([1.0, 0.0, 0.0, 0.0])
    xi = np.array([0.0, 1.0, 0.0, 0.0])
    s1 = sphere3.make_state(x, xi)
    s2 = sphere3.make_state(-x, xi)
    d = sphere3.distance(s1, s2)
    assert d == pytest.approx(math.pi, abs=1e-12)


@given(seed=st.integers(0, 10 ** 6), i=st.integers(0, 50), j=st.integers(0, 50),
       k=st.integers(0, 50))
@settings(max_examples=25, deadline=None)
def test_distance_metric_properties(seed, i, j, k):
    model = FlatTorus(2)
    a = model.liouville_sample(substream(seed, i))
    b = model.liouville_sample(substream(seed, j))
    c = model.liouville_sample(substream(seed, k))
    dab = model.distance(a, b)
    assert dab == pytest.approx(model.distance(b, a), abs=1e-12)
    assert dab <= model.distance(a, c) + model.distance(c, b) + 1e-12


@given(seed=st.integers(0, 10 ** 6), i=st.integers(0, 30), j=st.integers(0, 30),
       k=st.integers(0, 30))
@settings(max_examples=15, deadline=None)
def test_sphere3_metric_properties(seed, i, j, k):
    model = Sphere3()
    a = model.liouville_sample(substream(seed, i))
    b = model.liouville_sample(substream(seed, j))
    c = model.liouville_sample(substream(seed, k))
    dab = model.distance(a, b)
    assert dab == pytest.approx(model.distance(b, a), abs=1e-12)
    assert dab <= model.distance(a, c) + model.distance(c, b) + 1e-12
    assert model.distance(a, a) == 0.0


_SURFACE_CACHE = []


def _surface_singleton():
    if not _SURFACE_CACHE:
        from weyllab import validate_profile
        _SURFACE_CACHE.append(SurfaceOfRevolution(
            validate_profile({"preset": "spheroid", "a": 1.0, "c": 2.0})))
    return _SURFACE_CACHE[0]


@given(seed=st.integers(0, 10 ** 5), i=st.integers(0, 12), j=st.integers(0, 12),
       k=st.integers(0, 12))
@settings(max_examples=10, deadline=None)
def test_surface_metric_properties(seed, i, j, k):
    # the embedding chord distance is Euclidean in R^6: exact metric axioms
    model = _surface_singleton()
    a = model.liouville_sample(substream(seed, i))
    b = model.liouville_sample(substream(seed, j))
    c = model.liouville_sample(substream(seed, k))
    dab = model.distance(a, b)
    assert dab == pytest.approx(model.distance(b, a), abs=1e-12)
    assert dab <= model.distance(a, c) + model.distance(c, b) + 1e-12


def test_normalize_into_fundamental_domain(torus2, catmap):
    s = PhaseState(np.array([7.0, -2.5]), np.array([1.0, 0.0]), 1.0)
    out = torus2.normalize(s)
    assert np.all((out.position >= 0.0) & (out.position < TWO_PI))
    assert torus2.distance(out, torus2.normalize(out)) == 0.0
    s2 = PhaseState(np.array([1.3, 0.4, 0.0]), np.zeros(0), 1.0)
    out2 = catmap.normalize(s2)
    assert np.all((out2.position[:2] >= 0.0) & (out2.position[:2] < 1.0))


@given(seed=st.integers(0, 10 ** 6), i=st.integers(0, 30), j=st.integers(0, 30),
       k=st.integers(0, 30))
@settings(max_examples=15, deadline=None)
def test_suspension_metric_properties(seed, i, j, k):
    # the hyperbolic deck action is not a flat isometry, so the patch
    # distance satisfies the triangle inequality only up to the per-deck
    # stretch factor (the matrix spectral radius); symmetry is exact
    model = CatMapSuspension()
    a = model.liouville_sample(substream(seed, i))
    b = model.liouville_sample(substream(seed, j))
    c = model.liouville_sample(substream(seed, k))
    dab = model.distance(a, b)
    assert dab == pytest.approx(model.distance(b, a), abs=1e-12)
    assert dab <= model.lam * (model.distance(a, c) + model.distance(c, b)) + 1e-12


# -- group property and energy conservation ----------------------------------

@given(seed=st.integers(0, 10 ** 5), t=st.floats(0.0, 10.0), u=st.floats(0.0, 10.0))
@settings(max_examples=20, deadline=None)
def test_group_property_closed_form_models(seed, t, u):
    for model in (FlatTorus(2), CatMapSuspension(), Sphere3()):
        s = model.liouville_sample(substream(seed, 0))
        one = model.flow(s, t + u)
        two = model.flow(model.flow(s, t), u)
        assert model.distance(one, two) <= 1e-7


@pytest.mark.parametrize("t,u", [(0.7, 1.9), (3.0, 4.5), (8.0, 2.0)])
def test_group_property_surface(spheroid_model, t, u):
    s = spheroid_model.liouville_sample(substream(4, 2))
    one = spheroid_model.flow(s, t + u)
    two = spheroid_model.flow(spheroid_model.flow(s, t), u)
    assert spheroid_model.distance(one, two) <= 1e-7


def test_surface_energy_conservation(spheroid_model):
    s = spheroid_model.liouville_sample(substream(8, 5))
    for t in (1.0, 10.0, 40.0):
        out = spheroid_model.flow(s, t)
        drift = abs(out.energy - s.energy) / s.energy
        assert drift <= 1e-8 * max(1.0, t)


def test_catmap_flow_bitwise_exact(catmap):
    # flow at integer multiples of the roof equals the integer matrix power
    # applied through the chart, bit for bit
    u, v = 0.3, 0.7
    s = catmap.make_state([u, v, 0.0])
    for n in (1, 4, 9):
        out = catmap.flow(s, float(n))
        A = np.array([[2, 1], [1, 1]], dtype=object)
        M = np.linalg.matrix_power(A, n)
        fu, fv = Fraction(u), Fraction(v)
        eu = M[0, 0] * fu + M[0, 1] * fv
        ev = M[1, 0] * fu + M[1, 1] * fv
        expect = np.array([float(eu - math.floor(eu)), float(ev - math.floor(ev)), 0.0])
        assert np.array_equal(out.position, expect)


def test_state_energy_invariant(torus2):
    st_ = torus2.liouville_sample(substream(0, 0))
    torus2.check_state(st_)
    bad = PhaseState(st_.position, st_.momentum, 2.0)
    with pytest.raises(ValidationError):
        torus2.check_state(bad)


# -- Liouville sampling -------------------------------------------------------

def test_torus_sampling_uniform_mean(torus2):
    n = 1_000_000
    states = torus2.sample_states(123, n)
    pos = np.array([s.position for s in states])
    mean = pos.mean(axis=0)
    sigma = TWO_PI / math.sqrt(12.0) / math.sqrt(n)
    assert np.all(np.abs(mean - math.pi) <= 3.0 * sigma)


def test_sphere3_sampling_symmetric_mean(sphere3):
    n = 1_000_000
    states = sphere3.sample_states(77, n)
    mom = np.array([s.momentum for s in states])
    sigma = 0.5 / math.sqrt(n)
    assert np.all(np.abs(mom.mean(axis=0)) <= 3.0 * sigma)


def test_spheroid_sampling_band_fraction(spheroid_model, spheroid_profile):
    n = 100_000
    states = spheroid_model.sample_states(55, n)
    z = np.array([s.position[0] for s in states])
    frac = float(np.mean(np.abs(z) < 0.5))
    want = spheroid_profile.area_band(-0.5, 0.5) / spheroid_profile.area
    sigma = math.sqrt(want * (1 - want) / n)
    assert abs(frac - want) <= 3.0 * sigma


def test_sampling_substream_determinism(torus2):
    a = torus2.sample_states(42, 5)
    b = [torus2.liouville_sample(substream(42, i)) for i in range(5)]
    for x, y in zip(a, b):
        assert np.array_equal(x.position, y.position)
        assert np.array_equal(x.momentum, y.momentum)
