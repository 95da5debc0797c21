import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from equichern import algebra as alg
from equichern import chern as ch
from equichern import generalized as gen
from equichern.examples import (CATALOG, atiyah_case, atiyah_inequality_grid, atiyah_z, cotangent_circle_case,
                                exact_symplectic_case, g_function, g_prime, get_case, mean_decay_profile,
                                plane_rotation_case)

from .oracles import dense_exp


def test_plane_rotation_D_lambda_at_a_point():
    case = plane_rotation_case()
    got = case.one_form.D(np.array([1.0, 0.0]), np.array([2.0]))
    np.testing.assert_allclose(got, [2.0, 0, 0, 2.0], atol=1e-14)
    np.testing.assert_allclose(got, case.oracles["D_lambda"](np.array([1.0, 0.0]), np.array([2.0])), atol=1e-14)


def test_cotangent_D_lambda_at_a_point():
    case = cotangent_circle_case()
    p, X = np.array([0.3, 2.0]), np.array([1.0])
    np.testing.assert_allclose(case.one_form.D(p, X), [-2.0, 0, 0, 1.0], atol=1e-14)
    np.testing.assert_allclose(case.one_form.D(p, X), case.oracles["D_lambda"](p, X), atol=1e-14)


def test_g_and_its_derivative_near_zero():
    assert g_function(0.0) == 1
    assert g_prime(0.0) == 0.5
    z = np.array([1e-4j, 2e-3, 0.5 + 0.3j, 3j])
    np.testing.assert_allclose(g_function(z), np.expm1(z) / z, rtol=1e-13)
    np.testing.assert_allclose(g_prime(z), (z * np.exp(z) - np.expm1(z)) / z**2, rtol=1e-9)


def test_atiyah_z_coordinates():
    # xi1 = a + ib, xi2 = c + id; z1 = xi2 - i xi1
    z1, z2 = atiyah_z(np.array([0.2, -0.5, 0.5, 0.4]))
    xi1, xi2 = 0.2 - 0.5j, 0.5 + 0.4j
    assert z1 == pytest.approx(xi2 - 1j * xi1)
    assert z2 == pytest.approx(xi2 + 1j * xi1)


def test_atiyah_exp_curvature_against_dense_exponential():
    case = atiyah_case()
    spec = case.specs["sigma"]
    p = np.array([0.0, 0.0, 0.5, 0.2])
    assert atiyah_z(p)[0] == pytest.approx(0.5 + 0.2j)
    F = ch.curvature_array(spec, 0.7, np.array([0.3]), p)
    ref = dense_exp(F, spec.dim_plus)
    np.testing.assert_allclose(case.oracles["exp_curvature"](0.7, 0.3, p), ref, atol=1e-12)


@given(st.floats(0.0, 2.0), st.floats(-3.0, 3.0), st.lists(st.floats(-1.5, 1.5), min_size=4, max_size=4))
@settings(max_examples=40, deadline=None)
def test_atiyah_closed_forms(t, theta, pt):
    case = atiyah_case()
    p = np.array(pt)
    X = np.array([theta])
    E = alg.exp_array(ch.curvature_array(case.specs["sigma"], t, X, p), 1)
    np.testing.assert_allclose(E, case.oracles["exp_curvature"](t, theta, p), atol=1e-10)
    c, e = ch.chern_and_transgression(case.spec, t, X, p)
    np.testing.assert_allclose(c, case.oracles["chern"](t, theta, p), atol=1e-10)
    np.testing.assert_allclose(e, case.oracles["transgression"](t, theta, p), atol=1e-10)


def test_atiyah_D_lambda_two_ways():
    case = atiyah_case()
    pts = np.random.default_rng(4).normal(size=(25, 4))
    X = np.array([[0.7]])
    np.testing.assert_allclose(case.one_form.D(pts, X), case.oracles["D_lambda"](pts, X), atol=1e-12)
    np.testing.assert_allclose(case.oracles["D_lambda_z"](pts, X), case.oracles["D_lambda"](pts, X), atol=1e-12)


def test_atiyah_inequality_on_grid():
    case = atiyah_case()
    pts = atiyah_inequality_grid(6)
    assert pts.shape == (6**4, 4)
    R = np.sum(pts**2, axis=-1)
    assert R.min() == pytest.approx(2.0) and R.max() == pytest.approx(100.0)
    margin = case.oracles["inequality_margin"](pts)
    engine = ch.h_sigma(case.symbol, pts) + np.abs(case.one_form.moment(pts)[:, 0]) ** 2 - 0.5 * R
    np.testing.assert_allclose(engine, margin, atol=1e-10 * (1 + R.max() ** 2))
    assert margin.min() >= 0


def test_decay_profile_flags_small_radii():
    case = atiyah_case()
    table = mean_decay_profile(case, radii=np.array([0.5, 1.0, 2.0, 4.0]), order=96)
    np.testing.assert_array_equal(table.flagged, [True, True, False, False])
    assert np.all(table.norm > 0)
    assert table.norm[3] < table.norm[2]
    with pytest.raises(ValueError):
        mean_decay_profile(plane_rotation_case())


def test_kirwan_zero_set_and_moment():
    case = exact_symplectic_case()
    assert case.oracles["moment"](np.array([1.0, 0.0]))[0] == pytest.approx(0.5)
    assert case.oracles["kirwan_norm2"](np.zeros(2)) == 0
    assert case.oracles["kirwan_norm2"](np.array([1.0, 1.0])) == pytest.approx(2.0)


@pytest.mark.parametrize("w", [1.0, 2.0])
def test_theta_scales_inversely_with_the_weight(w):
    Q = gen.TestDensity.gaussian([1.0], 0.3)
    ref = exact_symplectic_case(1.0).oracles["theta_pairing"](Q)
    assert exact_symplectic_case(w).oracles["theta_pairing"](Q) == pytest.approx(ref / w, rel=1e-12)
    got = gen.symplectic_theta_pairing([[w]], Q).value
    assert abs(got - ref / w) <= 1e-4


def test_catalog_lookup():
    for name in CATALOG:
        assert get_case(name).name == name
    with pytest.raises(KeyError, match="unknown example"):
        get_case("klein_bottle")
