import numpy as np
import pytest
import scipy.integrate
from hypothesis import given, settings
from hypothesis import strategies as st

from equichern import algebra as alg
from equichern import chern as ch
from equichern import generalized as gen
from equichern.calculus import ChartedAction, constant_field
from equichern.examples import atiyah_case, get_case, multiplicativity_case, plane_rotation_case

line = ChartedAction(1, 1, lambda p: np.zeros(p.shape[:-1] + (1, 1)), name="line")


def _trivial(p, q, action=line):
    sym = ch.SymbolMorphism(p, q, lambda pts: np.zeros((q, p)))
    return ch.SuperconnectionSpec(action, sym, None)


def test_zero_symbol_has_zero_v_and_h():
    sym = ch.zero_symbol(2, 1)
    pts = np.array([[0.3], [1.0]])
    assert np.all(ch.v_sigma_matrix(sym, pts) == 0)
    assert np.all(ch.h_sigma(sym, pts) == 0)
    v = ch.assemble_v_sigma(sym, np.array([0.3]), 1)
    assert v.parity() == "zero"


def test_curvature_at_t_zero_is_the_moment():
    spec = multiplicativity_case().specs["sigma1"]
    p = np.array([0.4, -0.3])
    X = np.array([1.3])
    F = ch.curvature_array(spec, 0.0, X, p)
    np.testing.assert_allclose(F, ch.moment_term(spec, p, X), atol=1e-15)


@pytest.mark.parametrize("p,q", [(1, 0), (2, 1), (1, 3)])
def test_chern_of_flat_trivial_bundle_is_rank_difference(p, q):
    spec = _trivial(p, q)
    c = ch.chern_array(spec, 0.8, np.array([0.5]), np.array([0.2]))
    np.testing.assert_allclose(c, [p - q, 0], atol=1e-14)
    eta = ch.transgression_array(spec, 0.8, np.array([0.5]), np.array([0.2]))
    assert np.all(eta == 0)
    assert ch.transgression_identity_residual(spec, 0.8, np.array([0.5]), np.array([0.2])) == 0


def test_transgression_vanishes_at_t_zero():
    case = atiyah_case()
    eta = ch.transgression_array(case.specs["sigma"], 0.0, np.array([0.4]), case.sample_points[0])
    assert np.abs(eta).max() == 0


def test_transgression_identity_on_plane_rotation():
    spec = plane_rotation_case().spec
    r = ch.transgression_identity_residual(spec, 0.5, np.array([0.7]), np.array([1.0, 0.0]), dt=1e-4, h=1e-5)
    assert r <= 1e-6


def test_trivial_bundle_transgression_closed_form():
    # eta = -i lambda e^{it D lambda} for [0] on a line bundle
    case = plane_rotation_case()
    p = np.array([0.6, -0.8])
    X = np.array([1.3])
    t = 0.7
    lam = case.one_form.form(p, X)
    e = alg.exp_array((1j * t * case.oracles["D_lambda"](p, X))[:, None, None], 1)[:, 0, 0]
    np.testing.assert_allclose(ch.transgression_array(case.spec, t, X, p), -1j * alg.lam_mul(lam, e), atol=1e-14)


@pytest.mark.parametrize("name", ["plane_rotation", "atiyah", "multiplicativity"])
def test_chern_forms_are_closed(name):
    case = get_case(name)
    for spec in case.specs.values():
        for p in case.sample_points[:2]:
            assert ch.closedness_residual(spec, 1.0, case.sample_X[0], p) < 1e-7


def test_beta_truncated_zero_horizon():
    spec = plane_rotation_case().spec
    b = ch.beta_truncated(spec, 0.0, np.array([0.5]), np.array([1.0, 0.0]))
    assert np.all(b.value == 0)
    with pytest.raises(ValueError):
        ch.beta_truncated(spec, -1.0, np.array([0.5]), np.array([1.0, 0.0]))


def _beta_vs_simpson(spec, X, p, T=4.0):
    b = ch.beta_truncated(spec, T, X, p)
    t = np.linspace(0.0, T, 40001)
    vals = ch.transgression_array(spec, t[:, None], X, p).reshape(len(t), -1)
    return b, scipy.integrate.simpson(vals, x=t, axis=0)


def test_beta_of_pure_symbol_matches_fine_grid():
    # sigma(x) = x on the line: Str(v dv) cancels, so both sides vanish
    sym = ch.SymbolMorphism(1, 1, lambda p: p[..., :1, None] + 0j, jacobian=lambda p: np.ones(p.shape[:-1] + (1, 1, 1)))
    b, ref = _beta_vs_simpson(ch.SuperconnectionSpec(line, sym, None), np.array([0.0]), np.array([1.0]))
    np.testing.assert_allclose(b.value, ref, atol=1e-8)
    # sigma = x + iy on the plane has a nonzero degree-one transgression
    plane = ChartedAction(2, 1, lambda p: np.zeros(p.shape[:-1] + (1, 2)))
    bott = ch.SymbolMorphism(1, 1, lambda p: (p[..., 0] + 1j * p[..., 1])[..., None, None],
                             jacobian=lambda p: np.broadcast_to(np.array([1.0, 1j])[:, None, None],
                                                                p.shape[:-1] + (2, 1, 1)))
    b, ref = _beta_vs_simpson(ch.SuperconnectionSpec(plane, bott, None), np.array([0.0]), np.array([1.0, 0.5]))
    assert np.abs(ref).max() > 0.1
    np.testing.assert_allclose(b.value, ref, atol=1e-8)
    assert b.tail_estimate is not None and b.tail_estimate < 1e-6


# ---------------------------------------------------------------------------
# products of symbols

scalars = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


@given(scalars, scalars)
@settings(max_examples=50, deadline=None)
def test_odot_of_scalars_adds_h(a, b):
    s1 = ch.SymbolMorphism(1, 1, lambda p: np.full((1, 1), a))
    s2 = ch.SymbolMorphism(1, 1, lambda p: np.full((1, 1), b))
    prod = ch.odot_product(s1, s2)
    h = ch.h_sigma(prod, np.zeros(1))
    assert h == pytest.approx(abs(a) ** 2 + abs(b) ** 2, abs=1e-10)


@given(scalars, scalars)
@settings(max_examples=50, deadline=None)
def test_odot_square_against_explicit_tensor(a, b):
    s1 = ch.SymbolMorphism(1, 1, lambda p: np.full((1, 1), a))
    s2 = ch.SymbolMorphism(1, 1, lambda p: np.full((1, 1), b))
    prod = ch.odot_product(s1, s2)
    v = ch.v_sigma_matrix(prod, np.zeros(1))
    # explicit 4x4 assembly in the basis (e+f+, e-f-, e+f-, e-f+)
    v1 = np.array([[0, np.conj(a)], [a, 0]])
    v2 = np.array([[0, np.conj(b)], [b, 0]])
    eps = np.diag([1.0, -1.0])
    V = np.kron(v1, np.eye(2)) + np.kron(eps, v2)
    order = [0, 3, 1, 2]
    V = V[np.ix_(order, order)]
    np.testing.assert_allclose(v @ v, V @ V, atol=1e-12)
    np.testing.assert_allclose(V @ V, (abs(a) ** 2 + abs(b) ** 2) * np.eye(4), atol=1e-12)


def test_zero_odot_sigma_is_sigma():
    sig = atiyah_case().symbol
    prod = ch.odot_product(ch.zero_symbol(), sig)
    pts = np.random.default_rng(0).normal(size=(7, 4))
    np.testing.assert_allclose(prod(pts), sig(pts), atol=1e-15)
    np.testing.assert_allclose(ch.h_sigma(prod, pts), ch.h_sigma(sig, pts), atol=1e-12)


def test_product_factorization():
    case = multiplicativity_case()
    s1, s2, sp = case.specs["sigma1"], case.specs["sigma2"], case.specs["product"]
    for p in case.sample_points:
        for t in (0.0, 0.4, 1.1):
            X = np.array([0.8])
            c1, e1 = ch.chern_and_transgression(s1, t, X, p)
            c2, e2 = ch.chern_and_transgression(s2, t, X, p)
            c, e = ch.chern_and_transgression(sp, t, X, p)
            np.testing.assert_allclose(c, alg.lam_mul(c1, c2), atol=1e-12)
            np.testing.assert_allclose(e, alg.lam_mul(e1, c2) + alg.lam_mul(c1, e2), atol=1e-12)


# ---------------------------------------------------------------------------
# relative classes


def test_relative_product_unit():
    case = plane_rotation_case()
    a1 = ch.trivial_relative_rep(case.spec, 5.0)
    n = 2
    one = ch.RelativeRep(constant_field(np.array([1.0, 0, 0, 0]), n), constant_field(np.zeros(4), n, 1),
                         lambda p: np.ones(p.shape[:-1], bool))
    phi1, phi2 = ch.partition_of_unity(lambda p: np.full(p.shape[:-1], 1.0), lambda p: np.full(p.shape[:-1], 1.0), n)
    prod = ch.relative_product(a1, one, phi1, phi2)
    p = np.array([0.6, 0.8])
    X = np.array([0.9])
    np.testing.assert_allclose(prod.alpha(p, X), a1.alpha(p, X), atol=1e-14)
    np.testing.assert_allclose(prod.beta(p, X), 0.5 * a1.beta(p, X), atol=1e-14)


def test_compact_support_rep_with_unit_cutoff():
    case = plane_rotation_case()
    a = ch.trivial_relative_rep(case.spec, 3.0)
    chi = constant_field(np.array([1.0, 0, 0, 0]), 2)
    p = np.array([0.5, 0.2])
    X = np.array([1.1])
    np.testing.assert_allclose(ch.compact_support_rep(a, chi)(p, X), a.alpha(p, X), atol=1e-14)


def test_partition_must_cover():
    phi1, _ = ch.partition_of_unity(lambda p: -np.ones(p.shape[:-1]), lambda p: -np.ones(p.shape[:-1]), 2)
    with pytest.raises(ValueError):
        phi1(np.zeros((1, 2)), np.zeros((1, 1)))


def test_partition_gradient_matches_differences():
    phi1 = multiplicativity_case().extra["phi1"]
    p = np.array([[0.5, 0.3], [0.9, 0.2]])
    X = np.zeros((2, 1))
    analytic = phi1.jacobian(p, X)[..., 0]
    h = 1e-6
    fd = np.stack([(phi1(p + h * e, X)[..., 0] - phi1(p - h * e, X)[..., 0]) / (2 * h) for e in np.eye(2)], -1)
    np.testing.assert_allclose(analytic, fd, atol=1e-6)


def test_retarded_representative_on_plane_rotation():
    case = plane_rotation_case()
    chi = ch.scalar_function_field(2, lambda p: np.exp(-np.sum(p**2, axis=-1)),
                                   lambda p: -2 * p * np.exp(-np.sum(p**2, axis=-1))[..., None])
    r = ch.c_chi_T_residual(case.spec, chi, 1.0, 3.0, np.array([0.7]), np.array([0.8, 0.3]))
    assert r <= 1e-6


def test_product_spec_guards():
    case = multiplicativity_case()
    with pytest.raises(ValueError):
        ch.product_spec(case.specs["sigma2"], case.specs["sigma1"])
    other = gen.trivial_spec(atiyah_case().one_form)
    with pytest.raises(ValueError):
        ch.product_spec(case.specs["sigma1"], other)
