import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from equichern import algebra as alg
from equichern.algebra import ExteriorElement, GradedMatrixForm, HermitianPart

from .oracles import brute_product, dense_exp


@st.composite
def gmf_arrays(draw, n=None, dims=None, scale=1.0):
    n = draw(st.integers(1, 4)) if n is None else n
    if dims is None:
        p = draw(st.integers(0, 2))
        q = draw(st.integers(0 if p else 1, 3 - p))
    else:
        p, q = dims
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    d = p + q
    a = scale * (rng.normal(size=(1 << n, d, d)) + 1j * rng.normal(size=(1 << n, d, d)))
    return n, p, q, a


def _pair_like(n, p, q, seed, scale=1.0):
    rng = np.random.default_rng(seed)
    d = p + q
    return scale * (rng.normal(size=(1 << n, d, d)) + 1j * rng.normal(size=(1 << n, d, d)))


def test_unit_law():
    a = GradedMatrixForm(2, 1, 1, np.arange(16).reshape(4, 2, 2))
    one = GradedMatrixForm.identity(2, 1, 1)
    assert (a * one).allclose(a)
    assert (one * a).allclose(a)


def test_degree_one_generators_anticommute():
    dx = ExteriorElement.generator(0, 2)
    dy = ExteriorElement.generator(1, 2)
    assert (dx * dy).coefficients[0b11] == 1
    assert (dy * dx).coefficients[0b11] == -1
    assert np.all((dx * dx).coefficients == 0)


@given(gmf_arrays(n=2, dims=(1, 1)), st.integers(0, 2**32 - 1))
@settings(max_examples=50, deadline=None)
def test_product_matches_brute_force_expansion(data, seed):
    n, p, q, a = data
    b = _pair_like(n, p, q, seed)
    np.testing.assert_allclose(alg.gmf_mul(a, b, p), brute_product(a, b, p), atol=1e-12)


@given(gmf_arrays(), st.integers(0, 2**32 - 1))
@settings(max_examples=100, deadline=None)
def test_associative_and_submultiplicative(data, seed):
    n, p, q, a = data
    b = _pair_like(n, p, q, seed)
    c = _pair_like(n, p, q, seed + 1)
    lhs = alg.gmf_mul(alg.gmf_mul(a, b, p), c, p)
    rhs = alg.gmf_mul(a, alg.gmf_mul(b, c, p), p)
    scale = alg.graded_norm_array(a) * alg.graded_norm_array(b) * alg.graded_norm_array(c)
    assert alg.graded_norm_array(lhs - rhs) <= 1e-12 * scale
    ab = alg.gmf_mul(a, b, p)
    assert alg.graded_norm_array(ab) <= alg.graded_norm_array(a) * alg.graded_norm_array(b) * (1 + 1e-12)


@given(gmf_arrays(), st.integers(0, 2**32 - 1))
@settings(max_examples=100, deadline=None)
def test_supertrace_graded_cyclicity(data, seed):
    n, p, q, a = data
    A = GradedMatrixForm(n, p, q, a)
    B = GradedMatrixForm(n, p, q, _pair_like(n, p, q, seed))
    for x, px in ((A.even_part(), 0), (A.odd_part(), 1)):
        for y, py in ((B.even_part(), 0), (B.odd_part(), 1)):
            diff = alg.supertrace(x * y).coefficients - (-1) ** (px * py) * alg.supertrace(y * x).coefficients
            assert np.abs(diff).max() <= 1e-12 * max(1.0, alg.graded_norm(x) * alg.graded_norm(y))


def test_supertrace_examples():
    assert alg.supertrace(GradedMatrixForm.identity(2, 2, 3)).coefficients[0] == -1
    rng = np.random.default_rng(0)
    a = rng.normal(size=(4, 3, 3))
    a[:, :1, :1] = 0
    a[:, 1:, 1:] = 0
    assert np.all(alg.supertrace(GradedMatrixForm(2, 1, 2, a)).coefficients == 0)


@given(gmf_arrays())
@settings(max_examples=50, deadline=None)
def test_parts_have_declared_parity(data):
    n, p, q, a = data
    A = GradedMatrixForm(n, p, q, a)
    assert A.even_part().parity() in ("even", "zero")
    assert A.odd_part().parity() in ("odd", "zero")
    assert (A.even_part() + A.odd_part()).allclose(A)


@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_nilpotency(n, seed):
    rng = np.random.default_rng(seed)
    w = rng.normal(size=(1 << n, 2, 2))
    w[0] = 0
    power = np.zeros_like(w)
    power[0] = np.eye(2)
    for _ in range(n + 1):
        power = alg.gmf_mul(power, w, 1)
    assert np.all(power == 0)


def test_exp_zero_is_identity():
    z = GradedMatrixForm.zeros(3, 1, 1)
    assert alg.super_exponential(z).allclose(GradedMatrixForm.identity(3, 1, 1))


def test_exp_of_scalar_plus_top_form():
    c = 0.7 - 0.2j
    a = np.zeros((4, 1, 1), dtype=complex)
    a[0] = c
    a[3] = 1.0
    e = alg.exp_array(a, 1)
    np.testing.assert_allclose(e[:, 0, 0], np.exp(c) * np.array([1, 0, 0, 1]), atol=1e-15)


@given(gmf_arrays(scale=0.7))
@settings(max_examples=60, deadline=None)
def test_exponential_matches_dense_oracle(data):
    n, p, q, a = data
    ref = dense_exp(a, p)
    got = alg.exp_array(a, p)
    assert alg.graded_norm_array(got - ref) <= 1e-9 * alg.graded_norm_array(ref)


def test_exponential_with_clustered_spectrum():
    # repeated degree-0 eigenvalues exercise the near-node branch
    rng = np.random.default_rng(3)
    a = 0.3 * rng.normal(size=(8, 3, 3)) + 0j
    a[0] = np.diag([0.5, 0.5 + 1e-9, -0.2])
    ref = dense_exp(a, 2)
    assert alg.graded_norm_array(alg.exp_array(a, 2) - ref) <= 1e-9 * alg.graded_norm_array(ref)


@given(st.integers(1, 4), st.integers(1, 3), st.integers(0, 2**32 - 1))
@settings(max_examples=100, deadline=None)
def test_exponential_norm_bound(n, d, seed):
    rng = np.random.default_rng(seed)
    p = int(rng.integers(0, d + 1))
    G = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    R = HermitianPart(G + G.conj().T)
    S = GradedMatrixForm(n, p, d - p, 0.3 * _pair_like(n, p, d - p, seed + 1))
    Tc = 0.3 * _pair_like(n, p, d - p, seed + 2)
    Tc[0] = 0
    T = GradedMatrixForm(n, p, d - p, Tc)
    total = GradedMatrixForm.from_matrix(-R.matrix, n, p) + S + T
    assert alg.graded_norm(alg.super_exponential(total)) <= alg.exponential_norm_bound(R, S, T) * (1 + 1e-12)


def test_graded_norm_examples():
    assert alg.graded_norm(GradedMatrixForm.zeros(2, 1, 1)) == 0
    assert alg.graded_norm(GradedMatrixForm.identity(2, 1, 1)) == pytest.approx(1.0)


def test_smallest_eigenvalue():
    assert alg.smallest_eigenvalue(np.diag([1.0, 3.0])) == pytest.approx(1.0)
    assert alg.smallest_eigenvalue(np.zeros((2, 2))) == 0
    rng = np.random.default_rng(5)
    G = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    H = G + G.conj().T
    assert alg.smallest_eigenvalue(H) == pytest.approx(min(np.linalg.eigvals(H).real), abs=1e-12)
    with pytest.raises(ValueError):
        HermitianPart(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_shape_mismatch_raises():
    with pytest.raises(ValueError):
        GradedMatrixForm(2, 1, 1, np.zeros((4, 3, 3)))
    with pytest.raises(ValueError):
        GradedMatrixForm.zeros(2, 1, 1) * GradedMatrixForm.zeros(3, 1, 1)
