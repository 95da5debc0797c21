"""Superconnection curvature, Chern and transgression forms, and relative classes.

Everything is batched: ``points`` has shape ``(..., m)``, ``t`` shape ``(...)``
and ``X`` shape ``(..., k)``; all broadcast together.  End-valued forms are
arrays ``(..., 2**m, d, d)`` in the graded algebra of :mod:`equichern.algebra`,
scalar forms are arrays ``(..., 2**m)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.integrate

from . import algebra as alg
from .calculus import (
    ChartedAction,
    FormField,
    InvariantOneForm,
    contract,
    equivariant_differential,
    exterior_derivative,
    partial_derivatives,
)

QUAD_EPSABS = 1e-10


# ---------------------------------------------------------------------------
# symbols


@dataclass(frozen=True)
class SymbolMorphism:
    """A morphism sigma: E+ -> E- over the chart, ``evaluator(points) -> (..., q, p)``.

    ``h_plus`` and ``h_minus`` are the Gram matrices of the Hermitian
    structures; the adjoint is sigma* = h_plus^{-1} sigma^H h_minus.
    """

    dim_plus: int
    dim_minus: int
    evaluator: Callable[[np.ndarray], np.ndarray]
    h_plus: Optional[np.ndarray] = None
    h_minus: Optional[np.ndarray] = None
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = ""

    @property
    def dim(self) -> int:
        return self.dim_plus + self.dim_minus

    def __call__(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        s = np.asarray(self.evaluator(points), dtype=complex)
        return np.broadcast_to(s, points.shape[:-1] + (self.dim_minus, self.dim_plus))

    def adjoint(self, s: np.ndarray) -> np.ndarray:
        sh = np.conj(np.swapaxes(s, -1, -2))
        if self.h_plus is not None:
            sh = np.linalg.solve(self.h_plus, sh)
        if self.h_minus is not None:
            sh = sh @ self.h_minus
        return sh


def zero_symbol(dim_plus: int = 1, dim_minus: int = 0) -> SymbolMorphism:
    """The symbol [0] between E+ = C^p and E- = C^q."""
    return SymbolMorphism(dim_plus, dim_minus, lambda p: np.zeros((dim_minus, dim_plus)), name="[0]")


def v_sigma_matrix(sigma: SymbolMorphism, points) -> np.ndarray:
    """[[0, sigma*], [sigma, 0]], shape (..., d, d)."""
    s = sigma(points)
    p = sigma.dim_plus
    out = np.zeros(s.shape[:-2] + (sigma.dim, sigma.dim), dtype=complex)
    out[..., p:, :p] = s
    out[..., :p, p:] = sigma.adjoint(s)
    return out


def assemble_v_sigma(sigma: SymbolMorphism, point, n_generators: int) -> alg.GradedMatrixForm:
    v = v_sigma_matrix(sigma, np.asarray(point, dtype=float))
    return alg.GradedMatrixForm.from_matrix(v, n_generators, sigma.dim_plus)


def h_sigma(sigma: SymbolMorphism, points) -> np.ndarray:
    """Smallest eigenvalue of v_sigma^2."""
    v = v_sigma_matrix(sigma, points)
    return np.linalg.eigvalsh(v @ v)[..., 0]


def _graded_tensor_layout(p1, q1, p2, q2):
    """Permutation of the kron basis of E1 (x) E2 putting even vectors first."""
    par1 = np.r_[np.zeros(p1, int), np.ones(q1, int)]
    par2 = np.r_[np.zeros(p2, int), np.ones(q2, int)]
    par = (par1[:, None] + par2[None, :]).reshape(-1) % 2
    order = np.r_[np.flatnonzero(par == 0), np.flatnonzero(par == 1)]
    return order, int((par == 0).sum())


def tensor_left(a: np.ndarray, dims2: tuple, dims1: tuple) -> np.ndarray:
    """a (x) 1 in the graded tensor layout; a acts on E1, shape (..., d1, d1)."""
    p1, q1 = dims1
    p2, q2 = dims2
    order, _ = _graded_tensor_layout(p1, q1, p2, q2)
    full = np.kron(a, np.eye(p2 + q2)) if a.ndim == 2 else _batched_kron(a, np.eye(p2 + q2))
    return full[..., order[:, None], order[None, :]]


def tensor_right(b: np.ndarray, dims1: tuple, dims2: tuple) -> np.ndarray:
    """1 (x) b with the Koszul sign: Gamma_1^{|b|} (x) b, b of any parity."""
    p1, q1 = dims1
    p2, q2 = dims2
    order, _ = _graded_tensor_layout(p1, q1, p2, q2)
    be = b.copy()
    bo = np.zeros_like(b)
    bo[..., :p2, p2:] = b[..., :p2, p2:]
    bo[..., p2:, :p2] = b[..., p2:, :p2]
    be = b - bo
    gamma = np.diag(np.r_[np.ones(p1), -np.ones(q1)])
    full = _batched_kron(np.eye(p1 + q1), be) + _batched_kron(gamma, bo)
    return full[..., order[:, None], order[None, :]]


def _batched_kron(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    out = a[..., :, None, :, None] * b[..., None, :, None, :]
    s = out.shape
    return out.reshape(s[:-4] + (s[-4] * s[-3], s[-2] * s[-1]))


def odot_product(s1: SymbolMorphism, s2: SymbolMorphism) -> SymbolMorphism:
    """sigma1 ⊙ sigma2 read off from v = v1 (x) 1 + 1 (x) v2 on E1 (x) E2."""
    d1 = (s1.dim_plus, s1.dim_minus)
    d2 = (s2.dim_plus, s2.dim_minus)
    _, p = _graded_tensor_layout(*d1, *d2)
    d = s1.dim * s2.dim
    hp = hm = None
    if s1.h_plus is not None or s1.h_minus is not None or s2.h_plus is not None or s2.h_minus is not None:
        g1 = _gram(s1)
        g2 = _gram(s2)
        order, _ = _graded_tensor_layout(*d1, *d2)
        g = np.kron(g1, g2)[order[:, None], order[None, :]]
        hp, hm = g[:p, :p], g[p:, p:]

    def ev(points):
        v = tensor_left(v_sigma_matrix(s1, points), d2, d1) + tensor_right(v_sigma_matrix(s2, points), d1, d2)
        return v[..., p:, :p]

    jac = None
    if s1.jacobian is not None and s2.jacobian is not None:
        # v is linear in (sigma1, sigma2), so the same assembly maps jacobians
        def jac(points):
            j1 = _v_from_block(s1, np.asarray(s1.jacobian(points), dtype=complex))
            j2 = _v_from_block(s2, np.asarray(s2.jacobian(points), dtype=complex))
            j1, j2 = np.broadcast_arrays(j1, j2)
            v = tensor_left(j1, d2, d1) + tensor_right(j2, d1, d2)
            return v[..., p:, :p]

    return SymbolMorphism(p, d - p, ev, hp, hm, jac, name=f"({s1.name})⊙({s2.name})")


def _v_from_block(s: SymbolMorphism, block: np.ndarray) -> np.ndarray:
    out = np.zeros(block.shape[:-2] + (s.dim, s.dim), dtype=complex)
    out[..., s.dim_plus :, : s.dim_plus] = block
    out[..., : s.dim_plus, s.dim_plus :] = s.adjoint(block)
    return out


def _gram(s: SymbolMorphism) -> np.ndarray:
    g = np.eye(s.dim, dtype=complex)
    if s.h_plus is not None:
        g[: s.dim_plus, : s.dim_plus] = s.h_plus
    if s.h_minus is not None:
        g[s.dim_plus :, s.dim_plus :] = s.h_minus
    return g


# ---------------------------------------------------------------------------
# superconnection data


def linear_moment(weights: np.ndarray) -> Callable:
    """mu(X) = sum_a X_a weights[a] on the fibre, weights of shape (k, d, d)."""
    W = np.asarray(weights, dtype=complex)

    def mu(points, X):
        return np.einsum("...a,aij->...ij", np.asarray(X), W)

    return mu


@dataclass(frozen=True)
class SuperconnectionSpec:
    """Data for A + it(v_sigma + lambda) on a trivial Z2-graded bundle.

    ``connection`` is the End-valued one-form part A - d (no degree-0 term),
    ``fibre_moment(points, X) -> (..., d, d)`` is the infinitesimal fibre
    action; the moment is mu^A(X) = fibre_moment(X) - ι(VX)connection unless
    ``moment`` is supplied directly as ``(points, X) -> (..., 2**m, d, d)``.
    """

    action: ChartedAction
    symbol: SymbolMorphism
    one_form: Optional[InvariantOneForm] = None
    connection: Optional[FormField] = None
    fibre_moment: Optional[Callable] = None
    moment: Optional[Callable] = None
    name: str = ""

    @property
    def n(self) -> int:
        return self.action.chart_dim

    @property
    def N(self) -> int:
        return 1 << self.action.chart_dim

    @property
    def dim_plus(self) -> int:
        return self.symbol.dim_plus

    @property
    def dim(self) -> int:
        return self.symbol.dim

    def zero_x(self, points) -> np.ndarray:
        return np.zeros(np.shape(points)[:-1] + (self.action.lie_dim,))


def _deg0(mat: np.ndarray, N: int) -> np.ndarray:
    out = np.zeros(mat.shape[:-2] + (N,) + mat.shape[-2:], dtype=complex)
    out[..., 0, :, :] = mat
    return out


def _scalar_times_id(coeffs: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(coeffs)[..., None, None] * np.eye(d)


@dataclass(frozen=True)
class PointData:
    """t- and X-independent pieces of the curvature at a batch of points."""

    v: np.ndarray  # (..., N, d, d), degree 0
    v2: np.ndarray
    bracket: np.ndarray  # [A, v_sigma]
    A2: np.ndarray  # dω + ω·ω
    dlam: np.ndarray  # (..., N) scalar two-form
    lam: np.ndarray  # (..., N) scalar one-form
    flam: np.ndarray  # (..., k)
    conn: Optional[np.ndarray]


def point_data(spec: SuperconnectionSpec, points) -> PointData:
    points = np.asarray(points, dtype=float)
    N, d, p = spec.N, spec.dim, spec.dim_plus
    zx = spec.zero_x(points)
    vm = v_sigma_matrix(spec.symbol, points)
    v = _deg0(vm, N)
    v2 = _deg0(vm @ vm, N)
    # d(v_sigma) as dx^i (x) d_i v
    if spec.symbol.jacobian is not None:
        sj = np.asarray(spec.symbol.jacobian(points), dtype=complex)  # (..., m, q, p)
        dv = np.zeros(sj.shape[:-2] + (d, d), dtype=complex)
        dv[..., p:, :p] = sj
        dv[..., :p, p:] = spec.symbol.adjoint(sj)
    else:
        vfield = FormField(spec.n, lambda pts, X: _deg0(v_sigma_matrix(spec.symbol, pts), N), 0, (d, d))
        dv = partial_derivatives(vfield, points, zx)[..., 0, :, :]
    bracket = np.zeros(points.shape[:-1] + (N, d, d), dtype=complex)
    for i in range(spec.n):
        bracket[..., 1 << i, :, :] = dv[..., i, :, :]
    A2 = np.zeros_like(bracket)
    conn = None
    if spec.connection is not None:
        conn = np.asarray(spec.connection(points, zx), dtype=complex)
        bracket = bracket + alg.gmf_mul(conn, v, p) + alg.gmf_mul(v, conn, p)
        A2 = exterior_derivative(spec.connection, points, zx) + alg.gmf_mul(conn, conn, p)
    if spec.one_form is not None:
        lam = np.asarray(spec.one_form.form(points, zx), dtype=complex)
        dlam = np.asarray(spec.one_form.d(points), dtype=complex)
        flam = spec.one_form.moment(points)
    else:
        lam = np.zeros(points.shape[:-1] + (N,), dtype=complex)
        dlam = lam.copy()
        flam = np.zeros(points.shape[:-1] + (spec.action.lie_dim,))
    return PointData(v, v2, bracket, A2, dlam, lam, flam, conn)


def moment_term(spec: SuperconnectionSpec, points, X, data: PointData | None = None) -> np.ndarray:
    """mu^A(X) as an End-valued form."""
    points = np.asarray(points, dtype=float)
    X = np.asarray(X)
    if spec.moment is not None:
        return np.asarray(spec.moment(points, X), dtype=complex)
    lead = np.broadcast_shapes(points.shape[:-1], X.shape[:-1])
    out = np.zeros(lead + (spec.N, spec.dim, spec.dim), dtype=complex)
    if spec.fibre_moment is not None:
        out[..., 0, :, :] += spec.fibre_moment(points, X)
    if spec.connection is not None:
        conn = data.conn if data is not None else spec.connection(points, spec.zero_x(points))
        V = spec.action.vector_field(points, X)
        out -= contract(conn, V, 2)
    return out


def _expand(a, ndim_tail):
    """Append singleton axes so a (...)-shaped parameter broadcasts with forms."""
    a = np.asarray(a)
    return a.reshape(a.shape + (1,) * ndim_tail)


def curvature_array(spec: SuperconnectionSpec, t, X, points, data: PointData | None = None) -> np.ndarray:
    """F(sigma, lambda, A, t)(X) =
    -t^2 v^2 - it<f,X> + mu^A(X) + it[A, v] + A^2 + it dlambda."""
    points = np.asarray(points, dtype=float)
    X = np.asarray(X, dtype=float)
    if data is None:
        data = point_data(spec, points)
    t3 = _expand(t, 3)
    d = spec.dim
    F = -(t3**2) * data.v2 + 1j * t3 * data.bracket + data.A2
    F = F + moment_term(spec, points, X, data)
    if spec.one_form is not None:
        pair = np.einsum("...a,...a->...", data.flam, X)
        lam_part = _scalar_times_id(data.dlam, d)
        F = F + 1j * t3 * lam_part
        F = np.array(F)
        F[..., 0, :, :] -= 1j * _expand(t, 2) * _expand(pair, 2) * np.eye(d)
    return F


def assemble_curvature(spec: SuperconnectionSpec, t: float, X, point) -> alg.GradedMatrixForm:
    if t < 0:
        raise ValueError("t must be nonnegative")
    F = curvature_array(spec, t, np.asarray(X, dtype=float), np.asarray(point, dtype=float))
    return alg.GradedMatrixForm(spec.n, spec.dim_plus, spec.dim - spec.dim_plus, F)


def chern_and_transgression(spec: SuperconnectionSpec, t, X, points, data: PointData | None = None):
    """(Ch, eta) = (Str e^F, -i Str((v + lambda) e^F)), scalar form arrays."""
    points = np.asarray(points, dtype=float)
    if data is None:
        data = point_data(spec, points)
    F = curvature_array(spec, t, X, points, data)
    if spec.dim == 1:
        # rank one: the graded product is the exterior product of scalar forms
        sgn = 1.0 if spec.dim_plus == 1 else -1.0
        E = alg.exp_array(F, spec.dim_plus)[..., 0, 0]
        return sgn * E, -1j * sgn * alg.lam_mul(data.lam, E)
    E = alg.exp_array(F, spec.dim_plus)
    ch = alg.supertrace_array(E, spec.dim_plus)
    odd = data.v + _scalar_times_id(data.lam, spec.dim)
    eta = -1j * alg.supertrace_array(alg.gmf_mul(odd, E, spec.dim_plus), spec.dim_plus)
    return ch, eta


def chern_array(spec, t, X, points, data=None) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    if data is None:
        data = point_data(spec, points)
    F = curvature_array(spec, t, X, points, data)
    if spec.dim == 1:
        return (1.0 if spec.dim_plus == 1 else -1.0) * alg.exp_array(F, spec.dim_plus)[..., 0, 0]
    return alg.supertrace_array(alg.exp_array(F, spec.dim_plus), spec.dim_plus)


def transgression_array(spec, t, X, points, data=None) -> np.ndarray:
    return chern_and_transgression(spec, t, X, points, data)[1]


def chern_form(spec, t, X, point) -> alg.ExteriorElement:
    return alg.ExteriorElement(spec.n, chern_array(spec, t, np.asarray(X, float), np.asarray(point, float)))


def transgression_form(spec, t, X, point) -> alg.ExteriorElement:
    return alg.ExteriorElement(spec.n, transgression_array(spec, t, np.asarray(X, float), np.asarray(point, float)))


def chern_field(spec: SuperconnectionSpec, t) -> FormField:
    return FormField(spec.n, lambda p, X: chern_array(spec, t, X, p), 0, (), None, spec.action.domain, "Ch")


def transgression_field(spec: SuperconnectionSpec, t) -> FormField:
    return FormField(spec.n, lambda p, X: transgression_array(spec, t, X, p), 1, (), None, spec.action.domain, "eta")


def transgression_identity_residual(spec, t, X, point, dt=1e-4, h=None) -> float:
    """||(Ch(t+dt) - Ch(t-dt))/(2dt) + D(eta)(t)||, sum of coefficient moduli."""
    point = np.asarray(point, dtype=float)
    X = np.asarray(X, dtype=float)
    ch_p = chern_array(spec, t + dt, X, point)
    ch_m = chern_array(spec, t - dt, X, point)
    D_eta = equivariant_differential(transgression_field(spec, t), spec.action, point, X, h)
    res = (ch_p - ch_m) / (2 * dt) + D_eta
    return float(np.abs(res).sum(axis=-1).max())


def closedness_residual(spec, t, X, point) -> float:
    point = np.asarray(point, dtype=float)
    X = np.asarray(X, dtype=float)
    D_ch = equivariant_differential(chern_field(spec, t), spec.action, point, X)
    return float(np.abs(D_ch).sum(axis=-1).max())


# ---------------------------------------------------------------------------
# truncated beta


@dataclass(frozen=True)
class TruncatedBeta:
    value: np.ndarray
    T: float
    quad_error: float
    tail_estimate: Optional[float]


def tail_bound_gaussian(norm_at_T: float, T: float, h: float, q: int) -> float:
    """Integral over [T, inf) of C (1+t)^q e^{-h t^2} with C fitted at t = T."""
    if h <= 0:
        return float("inf")
    C = norm_at_T / ((1 + T) ** q * np.exp(-h * T * T))
    val, _ = scipy.integrate.quad(lambda s: C * (1 + s) ** q * np.exp(-h * s * s), T, np.inf)
    return float(val)


def beta_truncated(spec: SuperconnectionSpec, T: float, X, point, epsabs=QUAD_EPSABS) -> TruncatedBeta:
    """beta_T = int_0^T eta dt by adaptive Gauss-Kronrod panels.

    The tail estimate uses the Gaussian decay exp(-h_sigma t^2) at the point;
    it is unavailable (None) where h_sigma = 0, including on C_{lambda,sigma},
    where only pairings against test densities are meaningful.
    """
    if T < 0:
        raise ValueError("T must be nonnegative")
    point = np.asarray(point, dtype=float)
    X = np.asarray(X, dtype=float)
    if T == 0:
        return TruncatedBeta(np.zeros(np.broadcast_shapes(point.shape[:-1], X.shape[:-1]) + (spec.N,), complex), 0.0, 0.0, 0.0)
    data = point_data(spec, point)
    val, err = scipy.integrate.quad_vec(
        lambda t: transgression_array(spec, t, X, point, data), 0.0, T, epsabs=epsabs, epsrel=0.0, norm="max"
    )
    h = float(np.min(h_sigma(spec.symbol, point)))
    tail = None
    if h > 1e-12:
        tail = tail_bound_gaussian(float(np.abs(transgression_array(spec, T, X, point, data)).sum(-1).max()), T, h, spec.n)
    return TruncatedBeta(val, T, float(err), tail)


# ---------------------------------------------------------------------------
# relative classes


@dataclass(frozen=True)
class RelativeRep:
    """A pair (alpha, beta) with alpha closed and alpha = D(beta) off ``support``."""

    alpha: FormField
    beta: FormField
    support: Callable[[np.ndarray], np.ndarray]
    parity: int = 0
    T: float = np.inf

    def residual(self, action: ChartedAction, points, X) -> np.ndarray:
        """alpha - D(beta) at points off the support set."""
        return self.alpha(points, X) - equivariant_differential(self.beta, action, points, X)


def scalar_function_field(n: int, fn: Callable, grad: Callable | None = None, name="") -> FormField:
    """An invariant function as a 0-form field; ``grad(points) -> (..., m)``."""

    def ev(p, X):
        lead = np.broadcast_shapes(p.shape[:-1], X.shape[:-1])
        out = np.zeros(lead + (1 << n,), dtype=complex)
        out[..., 0] = fn(p)
        return out

    jac = None
    if grad is not None:
        def jac(p, X):
            lead = np.broadcast_shapes(p.shape[:-1], X.shape[:-1])
            out = np.zeros(lead + (n, 1 << n), dtype=complex)
            out[..., 0] = grad(p)
            return out

    return FormField(n, ev, 0, (), jac, None, name)


def _field_product(f: FormField, g: FormField) -> Callable:
    return lambda p, X: alg.lam_mul(f(p, X), g(p, X))


def _d_field(f: FormField) -> Callable:
    return lambda p, X: exterior_derivative(f, p, X)


def relative_product(a1: RelativeRep, a2: RelativeRep, phi1: FormField, phi2: FormField) -> RelativeRep:
    """(alpha1 alpha2, Phi1 beta1 alpha2 + s alpha1 Phi2 beta2 - s dPhi1 beta1 beta2), s = (-1)^{|a1|}."""
    n = phi1.n_generators
    s = -1.0 if a1.parity % 2 else 1.0

    def beta(p, X):
        b1 = a1.beta(p, X)
        b2 = a2.beta(p, X)
        al1 = a1.alpha(p, X)
        al2 = a2.alpha(p, X)
        f1 = phi1(p, X)
        f2 = phi2(p, X)
        df1 = exterior_derivative(phi1, p, X)
        lm = alg.lam_mul
        return lm(lm(f1, b1), al2) + s * lm(al1, lm(f2, b2)) - s * lm(lm(df1, b1), b2)

    alpha = FormField(n, _field_product(a1.alpha, a2.alpha), (a1.parity + a2.parity) % 2)
    return RelativeRep(
        alpha,
        FormField(n, beta, (a1.parity + a2.parity + 1) % 2),
        lambda p: np.logical_or(a1.support(p), a2.support(p)),
        (a1.parity + a2.parity) % 2,
        min(a1.T, a2.T),
    )


def compact_support_rep(a: RelativeRep, chi: FormField) -> FormField:
    """p^chi(alpha, beta) = chi alpha + dchi beta."""

    def ev(p, X):
        return alg.lam_mul(chi(p, X), a.alpha(p, X)) + alg.lam_mul(exterior_derivative(chi, p, X), a.beta(p, X))

    return FormField(chi.n_generators, ev, a.parity, (), None, None, "p_chi")


def bump_rho(s):
    """rho(s) = exp(-1/s) for s > 0, else 0."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    pos = s > 0
    out[pos] = np.exp(-1.0 / s[pos])
    return out


def partition_of_unity(d1: Callable, d2: Callable, n: int, grad1: Callable | None = None,
                       grad2: Callable | None = None):
    """Phi1 = rho(d1)/(rho(d1)+rho(d2)) and Phi2 = 1 - Phi1 as 0-form fields.

    With the gradients of d1 and d2 the fields carry analytic derivatives.
    """

    def parts(p):
        r1 = bump_rho(d1(p))
        r2 = bump_rho(d2(p))
        den = r1 + r2
        if np.any(den <= 0):
            raise ValueError("partition not subordinate: rho(d1)+rho(d2) vanishes at a sample")
        return r1, r2, den

    def phi1(p):
        r1, _, den = parts(p)
        return r1 / den

    g1 = g2 = None
    if grad1 is not None and grad2 is not None:
        def g1(p):
            r1, r2, den = parts(p)
            s1, s2 = d1(p), d2(p)
            # rho'(s) = rho(s)/s^2
            dr1 = np.where(r1 > 0, r1 / np.where(r1 > 0, s1, 1.0) ** 2, 0.0)
            dr2 = np.where(r2 > 0, r2 / np.where(r2 > 0, s2, 1.0) ** 2, 0.0)
            num = (dr1 * r2)[..., None] * grad1(p) - (r1 * dr2)[..., None] * grad2(p)
            return num / (den**2)[..., None]

        def g2(p):
            return -g1(p)

    return (
        scalar_function_field(n, phi1, g1, name="Phi1"),
        scalar_function_field(n, lambda p: 1.0 - phi1(p), g2, name="Phi2"),
    )


def trivial_relative_rep(spec: SuperconnectionSpec, T: float, n_nodes: int = 0) -> RelativeRep:
    """(Ch(A), beta_T) with beta_T = int_0^T eta from the engine."""

    def alpha(p, X):
        return chern_array(spec, 0.0, X, p)

    def beta(p, X):
        return beta_truncated(spec, T, X, p).value

    def support(p):
        h = h_sigma(spec.symbol, p)
        f = spec.one_form.moment(p) if spec.one_form is not None else np.zeros(p.shape[:-1] + (1,))
        return (h < 1e-12) & (np.linalg.norm(f, axis=-1) < 1e-12)

    return RelativeRep(FormField(spec.n, alpha, 0), FormField(spec.n, beta, 1), support, 0, T)


def retarded_rep(spec: SuperconnectionSpec, T_start: float, T: float) -> RelativeRep:
    """(Ch(sigma, lambda, A, T_start), int_{T_start}^T eta)."""

    def alpha(p, X):
        return chern_array(spec, T_start, X, p)

    def beta(p, X):
        full = beta_truncated(spec, T, X, p).value
        head = beta_truncated(spec, T_start, X, p).value
        return full - head

    return RelativeRep(FormField(spec.n, alpha, 0), FormField(spec.n, beta, 1), lambda p: np.zeros(p.shape[:-1], bool), 0, T)


def c_chi_T_residual(spec: SuperconnectionSpec, chi: FormField, T_start: float, T: float, X, point) -> float:
    """c(chi) - c(chi, T_start) - D(chi int_0^{T_start} eta), all truncated at T."""
    point = np.asarray(point, dtype=float)
    X = np.asarray(X, dtype=float)
    std = compact_support_rep(trivial_relative_rep(spec, T), chi)
    ret = compact_support_rep(retarded_rep(spec, T_start, T), chi)

    def inner(p, Y):
        return alg.lam_mul(chi(p, Y), beta_truncated(spec, T_start, Y, p).value)

    D_inner = equivariant_differential(FormField(spec.n, inner, 1), spec.action, point, X)
    res = std(point, X) - ret(point, X) - D_inner
    return float(np.abs(res).sum(-1).max())


# ---------------------------------------------------------------------------
# product superconnections


def product_spec(s1: SuperconnectionSpec, s2: SuperconnectionSpec) -> SuperconnectionSpec:
    """The superconnection A1 (x) 1 + 1 (x) A2 on E1 (x) E2 with symbol sigma1 ⊙ sigma2.

    The one-form of ``s1`` is kept; ``s2`` must not carry one.
    """
    if s1.action is not s2.action:
        raise ValueError("chart mismatch")
    if s2.one_form is not None:
        raise ValueError("only the first factor may carry a one-form")
    d1 = (s1.symbol.dim_plus, s1.symbol.dim_minus)
    d2 = (s2.symbol.dim_plus, s2.symbol.dim_minus)
    sym = odot_product(s1.symbol, s2.symbol)

    def lift(a1, a2):
        return tensor_left(a1, d2, d1) + tensor_right(a2, d1, d2)

    def moment(points, X):
        m1 = moment_term(s1, points, X)
        m2 = moment_term(s2, points, X)
        m1, m2 = np.broadcast_arrays(m1, m2)
        return lift(m1, m2)

    conn = None
    if s1.connection is not None or s2.connection is not None:
        N, n = s1.N, s1.n

        def cval(points, X):
            zx = np.zeros(np.broadcast_shapes(points.shape[:-1], X.shape[:-1]) + (s1.action.lie_dim,))
            c1 = s1.connection(points, zx) if s1.connection is not None else np.zeros(zx.shape[:-1] + (N, s1.dim, s1.dim))
            c2 = s2.connection(points, zx) if s2.connection is not None else np.zeros(zx.shape[:-1] + (N, s2.dim, s2.dim))
            return lift(np.asarray(c1, complex), np.asarray(c2, complex))

        conn = FormField(n, cval, 1, (sym.dim, sym.dim))

    return SuperconnectionSpec(s1.action, sym, s1.one_form, conn, None, moment, f"{s1.name}*{s2.name}")
