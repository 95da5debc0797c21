"""Charted group actions, form fields and the equivariant differential D = d - ι(VX).

Form fields are evaluated on batches: an evaluator takes ``points`` of shape
``(..., m)`` and Lie algebra elements ``X`` of shape ``(..., k)`` (broadcast
together) and returns exterior coefficients of shape ``(..., 2**m)`` for
scalar forms or ``(..., 2**m, d, d)`` for End-valued forms.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .algebra import koszul_sign, popcount

FD_STEP = 1e-5


@dataclass(frozen=True)
class ChartedAction:
    """A single chart with the infinitesimal action of a compact group.

    ``generators(points)`` returns the vectors V_p X_a for the Lie basis X_a,
    shape ``(..., lie_dim, chart_dim)``, with V_p X = d/de exp(-eX).p at e = 0.
    """

    chart_dim: int
    lie_dim: int
    generators: Callable[[np.ndarray], np.ndarray]
    metric: Optional[Callable[[np.ndarray], np.ndarray]] = None
    domain: Optional[Callable[[np.ndarray], np.ndarray]] = None
    cotangent_base_dim: Optional[int] = None
    name: str = ""

    def vector_field(self, points, X) -> np.ndarray:
        """V_p X, linear in X."""
        V = self.generators(np.asarray(points, dtype=float))
        X = np.asarray(X)
        return np.einsum("...a,...ai->...i", X, V)


@dataclass(frozen=True)
class FormField:
    """An equivariant form field alpha(X) on a chart."""

    n_generators: int
    evaluator: Callable[[np.ndarray, np.ndarray], np.ndarray]
    parity: int = 0
    value_shape: tuple = ()
    jacobian: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    domain: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = ""

    def __call__(self, points, X) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        X = np.asarray(X)
        lead = np.broadcast_shapes(points.shape[:-1], X.shape[:-1])
        out = np.asarray(self.evaluator(points, X))
        target = lead + (1 << self.n_generators,) + tuple(self.value_shape)
        return np.broadcast_to(out, target)


def constant_field(value: np.ndarray, n: int, parity: int = 0) -> FormField:
    value = np.asarray(value)

    def ev(points, X):
        return value

    def jac(points, X):
        lead = np.broadcast_shapes(points.shape[:-1], X.shape[:-1])
        return np.zeros(lead + (n,) + value.shape, dtype=complex)

    return FormField(n, ev, parity, tuple(value.shape[1:]), jac)


# ---------------------------------------------------------------------------
# d and contraction on coefficient arrays


@lru_cache(maxsize=None)
def _wedge_dx_table(n: int):
    """For each i: (I without i, I|i, sign of dx^i ^ e_I)."""
    out = []
    for i in range(n):
        src = np.array([I for I in range(1 << n) if not I >> i & 1], dtype=int)
        dst = src | (1 << i)
        sg = np.array([koszul_sign(1 << i, I) for I in src], dtype=float)
        out.append((src, dst, sg))
    return tuple(out)


@lru_cache(maxsize=None)
def _contraction_table(n: int):
    """For each i: (I containing i, I minus i, sign (-1)^{# generators below i})."""
    out = []
    for i in range(n):
        src = np.array([I for I in range(1 << n) if I >> i & 1], dtype=int)
        dst = src ^ (1 << i)
        sg = np.array([(-1.0) ** popcount(I & ((1 << i) - 1)) for I in src])
        out.append((src, dst, sg))
    return tuple(out)


def _lam_last(arr: np.ndarray, value_ndim: int) -> np.ndarray:
    return np.moveaxis(arr, -1 - value_ndim, -1) if value_ndim else arr


def _lam_back(arr: np.ndarray, value_ndim: int) -> np.ndarray:
    return np.moveaxis(arr, -1, -1 - value_ndim) if value_ndim else arr


def wedge_dx(coeffs: np.ndarray, i: int, value_ndim: int = 0) -> np.ndarray:
    """dx^i ^ alpha."""
    a = _lam_last(np.asarray(coeffs), value_ndim)
    n = a.shape[-1].bit_length() - 1
    src, dst, sg = _wedge_dx_table(n)[i]
    out = np.zeros(a.shape, dtype=np.result_type(a, float))
    out[..., dst] = sg * a[..., src]
    return _lam_back(out, value_ndim)


def exterior_derivative_from_jacobian(jac: np.ndarray, value_ndim: int = 0) -> np.ndarray:
    """d alpha = sum_i dx^i ^ d_i alpha, with jac[..., i, coeffs...]."""
    jac = np.asarray(jac)
    m = jac.shape[-2 - value_ndim]
    out = 0
    for i in range(m):
        out = out + wedge_dx(jac[..., i, :, :, :] if value_ndim else jac[..., i, :], i, value_ndim)
    return out


def contract(coeffs: np.ndarray, vec: np.ndarray, value_ndim: int = 0) -> np.ndarray:
    """Interior product ι(v) alpha, v of shape (..., m)."""
    a = _lam_last(np.asarray(coeffs), value_ndim)
    vec = np.asarray(vec)
    if value_ndim:
        vec = vec[..., None, None, :]
    n = a.shape[-1].bit_length() - 1
    shape = np.broadcast_shapes(a.shape, vec.shape[:-1] + (a.shape[-1],))
    out = np.zeros(shape, dtype=np.result_type(a, vec, float))
    for i, (src, dst, sg) in enumerate(_contraction_table(n)):
        out[..., dst] += sg * vec[..., i : i + 1] * a[..., src]
    return _lam_back(out, value_ndim)


def fd_step(points: np.ndarray) -> np.ndarray:
    return FD_STEP * (1.0 + np.linalg.norm(points, axis=-1))


STENCIL_OFFSETS = np.array([1.0, -1.0, 0.5, -0.5])


def stencil_points(points, h=None):
    """Difference stencil around each point, shape (..., m, 4, m), and the step h."""
    points = np.asarray(points, dtype=float)
    m = points.shape[-1]
    if h is None:
        h = fd_step(points)
    h = np.broadcast_to(np.asarray(h, dtype=float), points.shape[:-1])
    eye = np.eye(m)
    stencil = (
        points[..., None, None, :]
        + h[..., None, None, None] * STENCIL_OFFSETS[None, :, None] * eye[:, None, :]
    )
    return stencil, h


def derivatives_from_stencil(vals: np.ndarray, h: np.ndarray, tail_ndim: int) -> np.ndarray:
    """Partial derivatives from values on ``stencil_points``.

    ``vals`` has shape ``(..., m, 4, *tail)``; returns ``(..., m, *tail)``.
    Central differences at steps h and h/2 combined by one Richardson level.
    """
    v = np.moveaxis(vals, -1 - tail_ndim, 0)
    hh = np.asarray(h).reshape(np.shape(h) + (1,) * (1 + tail_ndim))
    d1 = (v[0] - v[1]) / (2 * hh)
    d2 = (v[2] - v[3]) / hh
    return (4 * d2 - d1) / 3


def partial_derivatives(f: FormField, points, X, h=None) -> np.ndarray:
    """Coefficient derivatives, shape (..., m, 2**m, value...)."""
    points = np.asarray(points, dtype=float)
    X = np.asarray(X)
    if f.jacobian is not None:
        return np.asarray(f.jacobian(points, X))
    stencil, h = stencil_points(points, h)
    if f.domain is not None and not np.all(f.domain(stencil)):
        raise ValueError("point too close to the chart boundary for the difference stencil")
    vals = f(stencil, X[..., None, None, :])
    return derivatives_from_stencil(vals, h, 1 + len(f.value_shape))


def exterior_derivative(f: FormField, points, X, h=None) -> np.ndarray:
    jac = partial_derivatives(f, points, X, h)
    return exterior_derivative_from_jacobian(jac, len(f.value_shape))


def equivariant_differential(f: FormField, action: ChartedAction, points, X, h=None) -> np.ndarray:
    """(D alpha)(X) = d(alpha(X)) - ι(VX) alpha(X) at the given points."""
    points = np.asarray(points, dtype=float)
    X = np.asarray(X)
    vn = len(f.value_shape)
    da = exterior_derivative(f, points, X, h)
    V = action.vector_field(points, X)
    return da - contract(f(points, X), V, vn)


def apply_D(f: FormField, action: ChartedAction, name: str = "") -> FormField:
    """The field X -> D(alpha)(X), itself evaluable (finite differences nest)."""

    def ev(points, X):
        return equivariant_differential(f, action, points, X)

    return FormField(f.n_generators, ev, 1 - f.parity, f.value_shape, None, f.domain, name or f"D({f.name})")


def lie_derivative_residual(f: FormField, action: ChartedAction, points, X) -> np.ndarray:
    """Sup-norm of the Lie derivative of alpha(X) along VX, via Cartan's formula."""
    vn = len(f.value_shape)

    def contracted(p, Y):
        return contract(f(p, Y), action.vector_field(p, Y), vn)

    g = FormField(f.n_generators, contracted, 1 - f.parity, f.value_shape, None, f.domain)
    points = np.asarray(points, dtype=float)
    X = np.asarray(X)
    lie = exterior_derivative(g, points, X) + contract(
        exterior_derivative(f, points, X), action.vector_field(points, X), vn
    )
    axes = tuple(range(-1 - vn, 0))
    return np.abs(lie).max(axis=axes)


# ---------------------------------------------------------------------------
# invariant one-forms


@dataclass(frozen=True)
class InvariantOneForm:
    """An X-independent invariant one-form with its moment f_lambda."""

    action: ChartedAction
    form: FormField
    name: str = ""

    def components(self, points) -> np.ndarray:
        """(lambda_1, ..., lambda_m) in the chart basis, shape (..., m)."""
        points = np.asarray(points, dtype=float)
        m = self.action.chart_dim
        coeffs = self.form(points, np.zeros(points.shape[:-1] + (self.action.lie_dim,)))
        return coeffs[..., [1 << i for i in range(m)]]

    def moment(self, points) -> np.ndarray:
        """f_lambda(p) as components on the Lie basis, shape (..., lie_dim)."""
        points = np.asarray(points, dtype=float)
        lam = self.components(points)
        V = self.action.generators(points)
        return np.einsum("...i,...ai->...a", lam, V)

    def pairing(self, points, X) -> np.ndarray:
        """<f_lambda(p), X>."""
        return np.einsum("...a,...a->...", self.moment(points), np.asarray(X))

    def d(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        return exterior_derivative(self.form, points, np.zeros(points.shape[:-1] + (self.action.lie_dim,)))

    def D(self, points, X) -> np.ndarray:
        """D(lambda)(X) = d lambda - <f_lambda, X>."""
        points = np.asarray(points, dtype=float)
        X = np.asarray(X)
        out = self.d(points)
        lead = np.broadcast_shapes(out.shape[:-1], X.shape[:-1])
        out = np.array(np.broadcast_to(out, lead + out.shape[-1:]), dtype=complex)
        out[..., 0] -= self.pairing(points, X)
        return out

    def __add__(self, other: "InvariantOneForm") -> "InvariantOneForm":
        if other.action is not self.action:
            raise ValueError("one-forms live on different charted actions")
        f, g = self.form, other.form

        def ev(p, X):
            return f(p, X) + g(p, X)

        jac = None
        if f.jacobian is not None and g.jacobian is not None:
            def jac(p, X):
                return np.asarray(f.jacobian(p, X)) + np.asarray(g.jacobian(p, X))

        return InvariantOneForm(self.action, FormField(f.n_generators, ev, 1, (), jac, f.domain),
                                f"{self.name}+{other.name}")


def one_form_field(action: ChartedAction, components: Callable, jacobian: Callable | None = None,
                   name: str = "") -> InvariantOneForm:
    """Wrap ``components(points) -> (..., m)`` (and optional ``(..., m, m)`` Jacobian
    with [..., j, i] = d_j lambda_i) as an InvariantOneForm."""
    m = action.chart_dim
    idx = [1 << i for i in range(m)]

    def ev(points, X):
        lead = np.broadcast_shapes(points.shape[:-1], X.shape[:-1])
        out = np.zeros(lead + (1 << m,), dtype=complex)
        out[..., idx] = np.asarray(components(points))
        return out

    jac = None
    if jacobian is not None:
        def jac(points, X):
            lead = np.broadcast_shapes(points.shape[:-1], X.shape[:-1])
            out = np.zeros(lead + (m, 1 << m), dtype=complex)
            out[..., idx] = np.asarray(jacobian(points))
            return out

    return InvariantOneForm(action, FormField(m, ev, 1, (), jac, action.domain, name), name)


def moment_of_one_form(lam: InvariantOneForm, point) -> np.ndarray:
    return lam.moment(point)


def liouville_data(action: ChartedAction, covector_pairing: np.ndarray | None = None) -> InvariantOneForm:
    """Liouville form omega = -<xi, dx> on a cotangent chart (x, xi).

    ``covector_pairing`` G identifies chart fibre coordinates with covectors,
    <xi, v> = (G xi) . v; the default is the identity.  The moment is
    f_omega(X) = <omega, VX> = -<xi, V_x X> for cotangent-lifted actions.
    """
    b = action.cotangent_base_dim
    if b is None or action.chart_dim != 2 * b:
        raise ValueError("chart is not flagged as a cotangent chart")
    G = np.eye(b) if covector_pairing is None else np.asarray(covector_pairing, dtype=float)

    def comps(points):
        xi = points[..., b:]
        out = np.zeros(points.shape, dtype=float)
        out[..., :b] = -np.einsum("ij,...j->...i", G, xi)
        return out

    def jac(points):
        out = np.zeros(points.shape[:-1] + (2 * b, 2 * b))
        out[..., b:, :b] = -G.T
        return out

    return one_form_field(action, comps, jac, name="liouville")


def kirwan_vector(action: ChartedAction, moment: Callable, points) -> np.ndarray:
    """k(p) = V_p(Phi(p)) with k* identified to k through the Lie basis."""
    points = np.asarray(points, dtype=float)
    return action.vector_field(points, moment(points))


def kirwan_one_form(action: ChartedAction, moment: Callable, points) -> np.ndarray:
    """Components of lambda_k = (k, -) in the chart basis."""
    if action.metric is None:
        raise ValueError("Kirwan one-form needs a metric on the chart")
    points = np.asarray(points, dtype=float)
    k = kirwan_vector(action, moment, points)
    return np.einsum("...ij,...j->...i", action.metric(points), k)


def kirwan_form_field(action: ChartedAction, moment: Callable) -> InvariantOneForm:
    if action.metric is None:
        raise ValueError("Kirwan one-form needs a metric on the chart")
    return one_form_field(action, lambda p: kirwan_one_form(action, moment, p), name="kirwan")
