import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from equichern import generalized as gen
from equichern.calculus import one_form_field
from equichern.examples import boundary_value_oracle, cotangent_circle_case, get_case, plane_rotation_case
from equichern.generalized import TestDensity


def _zero_family(points):
    lead = np.shape(points)[:-1]
    return lambda t, X: np.zeros(lead + np.shape(X)[:-1] + (4,), dtype=complex)


def test_zero_family_pairs_to_zero():
    Q = TestDensity.gaussian([1.0], 0.3)
    pv = gen.pair_family_with_density(_zero_family, Q, 5.0, np.array([1.0, 0.0]))
    assert np.all(pv.value == 0)


def test_oscillating_family_against_fourier_transform():
    Q = TestDensity.gaussian([0.7], 0.4)

    def family(points):
        def ev(t, X):
            t = np.asarray(t, dtype=float)
            out = np.zeros(np.broadcast_shapes(t.shape, X.shape[:-1]) + (2,), dtype=complex)
            out[..., 0] = np.exp(1j * t * X[..., 0])
            return out
        return ev

    T = 6.0
    got = gen.pair_family_with_density(family, Q, T, np.array([0.0])).value[0]
    ts, ws = gen.time_rule(T, 0.5, 16).nodes()
    ref = ws @ Q.fourier(-ts[:, None])
    assert abs(got - ref) < 1e-10


def test_beta_of_plane_rotation_is_a_boundary_value():
    case = plane_rotation_case()
    Q = case.extra["density"]
    pv = gen.pair_family_with_density(gen.engine_transgression(case.spec), Q, 200.0, np.array([1.0, 0.0]))
    ref = boundary_value_oracle(Q, +1) * case.oracles["beta_form"](np.array([1.0, 0.0]))
    assert np.abs(pv.value - ref).sum() <= 1e-4


@given(st.floats(0.2, 2.0), st.floats(-1.0, 1.0), st.floats(-1.0, 1.0))
@settings(max_examples=10, deadline=None)
def test_pairing_is_linear_in_the_density(width, a, b):
    case = plane_rotation_case()
    fam = gen.engine_transgression(case.spec)
    p = np.array([0.6, 0.8])
    Q1 = TestDensity.gaussian([0.5], width, amplitude=a)
    Q2 = TestDensity.gaussian([0.5], width, amplitude=b)
    Q12 = TestDensity.gaussian([0.5], width, amplitude=a + b)
    v = [gen.pair_family_with_density(fam, Q, 3.0, p, order=64).value for Q in (Q1, Q2, Q12)]
    np.testing.assert_allclose(v[2], v[0] + v[1], atol=1e-10)


@pytest.mark.parametrize("sign", [1, -1])
def test_boundary_value_of_even_density(sign):
    Q = TestDensity.gaussian([0.0], 0.5)
    assert gen.boundary_value_pairing(Q, sign) == pytest.approx(-sign * 1j * np.pi, abs=1e-12)
    assert gen.boundary_value_pairing(Q, sign, route="fourier") == pytest.approx(-sign * 1j * np.pi, abs=1e-8)


@pytest.mark.parametrize("Q", [TestDensity.bump([0.5], 1.0), TestDensity.gaussian([-0.4], 0.5, cut=6.0)])
def test_boundary_value_routes_agree(Q):
    for sign in (1, -1):
        a = gen.boundary_value_pairing(Q, sign, "pv")
        b = gen.boundary_value_pairing(Q, sign, "fourier")
        assert abs(a - b) <= 1e-8


def test_boundary_value_away_from_zero_is_real():
    Q = TestDensity.bump([2.0], 1.0)
    v = gen.boundary_value_pairing(Q, 1)
    assert v.imag == 0
    with pytest.raises(ValueError):
        gen.boundary_value_pairing(TestDensity.bump([0.0, 0.0], 1.0), 1)


def test_cotangent_beta_sign_split():
    case = cotangent_circle_case()
    Q = TestDensity.gaussian([0.0], 0.4)
    up = case.oracles["beta_pairing"](Q, np.array([0.0, 1.0]))
    down = case.oracles["beta_pairing"](Q, np.array([0.0, -1.0]))
    assert up[1].imag == pytest.approx(-down[1].imag)
    fam = gen.engine_transgression(case.spec)
    for xi, ref in ((1.0, up), (-1.0, down)):
        pv = gen.pair_family_with_density(fam, Q, 200.0, np.array([0.0, xi]))
        assert np.abs(pv.value - ref).sum() <= 1e-4


@pytest.mark.parametrize("name", ["plane_rotation", "cotangent_circle"])
def test_localization_decreases(name):
    case = get_case(name)
    Q = case.extra["density"]
    p = case.extra["localization_point"]
    seq = [gen.localization_residual(case.one_form, Q, T, p) for T in (10.0, 20.0, 40.0)]
    assert seq[0] > seq[1] > seq[2]
    assert seq[2] <= 1e-4


def test_localization_refuses_critical_points():
    case = plane_rotation_case()
    with pytest.raises(ValueError):
        gen.localization_residual(case.one_form, case.extra["density"], 10.0, np.array([1e-3, 0.0]))


def test_localization_matches_gaussian_prediction():
    case = plane_rotation_case()
    Q = case.extra["density"]
    r = gen.localization_residual(case.one_form, Q, 10.0, np.array([1.0, 0.0]))
    assert r == pytest.approx(case.oracles["localization_residual"](Q, 10.0, 1.0), rel=1e-6)


def test_one_form_regions():
    case = get_case("torus")
    mu, split = case.extra["mu"], case.extra["split"]
    assert gen.one_form_region(case.one_form, mu, split, case.extra["U1_point"]) == 1
    # the regions overlap; a vanishing first momentum puts a point in U_2 only
    assert gen.one_form_region(case.one_form, mu, split, np.array([0.4, 1.1, 0.0, 1.0])) == 2
    assert gen.one_form_region(case.one_form, mu, split, np.array([0.4, 1.1, 0.0, 0.0])) == 0
    Q = case.extra["density"]
    with pytest.raises(ValueError):
        gen.one_form_sum_identity_residual(case.one_form, mu, split, Q, 5.0, np.array([0.4, 1.1, 0.0, 0.0]))
    with pytest.raises(ValueError):
        gen.one_form_sum_identity_residual(case.one_form, mu, split, Q, 5.0, np.array([0.0, 0.0, 1.0, 0.0]),
                                           region=2)


def test_one_form_sum_with_zero_second_form():
    case = get_case("torus")
    zero = one_form_field(case.action, lambda p: np.zeros(p.shape), lambda p: np.zeros(p.shape[:-1] + (4, 4)),
                          name="zero")
    r = gen.one_form_sum_identity_residual(case.one_form, zero, 1, case.extra["density"], 4.0,
                                           case.extra["U1_point"], region=1)
    assert r <= 1e-10


def test_theta_needs_proper_moment():
    Q = TestDensity.gaussian([1.0], 0.3)
    with pytest.raises(ValueError):
        gen.symplectic_theta_pairing([[0.0]], Q)
    with pytest.raises(ValueError):
        gen.check_proper([[1.0], [-1.0]])
    X = gen.check_proper([[1.0, 0.0], [0.5, 2.0]])
    assert np.all(np.array([[1.0, 0.0], [0.5, 2.0]]) @ X >= 1 - 1e-9)


def test_theta_matches_boundary_value_closed_form():
    Q = TestDensity.gaussian([1.0], 0.3)
    got = gen.symplectic_theta_pairing([[1.0]], Q).value
    ref = -2 * np.pi * boundary_value_oracle(Q, +1)
    assert abs(got - ref) <= 1e-4


def test_theta_is_linear_in_the_density():
    Q1 = TestDensity.gaussian([1.0], 0.3, amplitude=1.0)
    Q2 = TestDensity.gaussian([1.0], 0.3, amplitude=-2.5)
    a = gen.symplectic_theta_pairing([[1.0]], Q1).value
    b = gen.symplectic_theta_pairing([[1.0]], Q2).value
    assert b == pytest.approx(-2.5 * a, rel=1e-9)


def test_density_support_and_seminorms():
    Q = TestDensity.bump([0.3], 0.8)
    X = np.linspace(-2, 2, 1001)[:, None]
    assert np.all(Q(X)[~Q.contains(X)] == 0)
    norms = [Q.seminorm(r) for r in range(4)]
    assert all(a <= b for a, b in zip(norms, norms[1:]))
    G = TestDensity.gaussian([0.2, -0.1], 0.5)
    s = np.array([[0.3, 1.2], [2.0, -0.5]])
    np.testing.assert_allclose(G.fourier_numeric(s, order=96), G.fourier(s), atol=1e-10)
    with pytest.raises(ValueError):
        TestDensity(center=(0.0,), radius=-1.0)


def test_time_rule_integrates_polynomials():
    rule = gen.time_rule(7.0, 1.0, 8, first_panel=0.1)
    t, w = rule.nodes()
    assert rule.edges[0] == 0 and rule.T == 7.0
    assert w @ t**5 == pytest.approx(7.0**6 / 6, rel=1e-13)
    x, _ = rule.panel_nodes(2)
    C = rule.cumulative_matrix(2)
    a = rule.edges[2]
    np.testing.assert_allclose(C @ x**3, (x**4 - a**4) / 4, rtol=1e-12)
