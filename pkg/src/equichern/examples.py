"""Catalog of explicit examples with closed-form oracles.

Every oracle here is written out by hand from the closed forms; none of them
calls the curvature engine, the graded algebra or the pairing machinery.
Exterior coefficients use the same bitmask layout as the rest of the package
(bit i of the index is dx^i).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.integrate

from . import chern as ch
from . import generalized as gen
from .calculus import ChartedAction, InvariantOneForm, liouville_data, one_form_field


# ---------------------------------------------------------------------------
# independent exterior helpers for the oracles


def _sign(a: int, b: int) -> int:
    """Sign of dx^a ^ dx^b -> dx^(a|b) by counting transpositions directly."""
    ia = [i for i in range(a.bit_length()) if a >> i & 1]
    ib = [i for i in range(b.bit_length()) if b >> i & 1]
    swaps = sum(1 for i in ia for j in ib if i > j)
    return -1 if swaps % 2 else 1


def wedge(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Exterior product of scalar coefficient arrays (..., 2**n), by explicit loops."""
    u, v = np.broadcast_arrays(np.asarray(u, dtype=complex), np.asarray(v, dtype=complex))
    N = u.shape[-1]
    out = np.zeros(u.shape, dtype=complex)
    for a in range(N):
        if not np.any(u[..., a]):
            continue
        for b in range(N):
            if a & b:
                continue
            out[..., a | b] += _sign(a, b) * u[..., a] * v[..., b]
    return out


def _one_form(coeffs, n: int) -> np.ndarray:
    """Coefficient array of sum_i coeffs[..., i] dx^i."""
    coeffs = np.asarray(coeffs, dtype=complex)
    out = np.zeros(coeffs.shape[:-1] + (1 << n,), dtype=complex)
    for i in range(n):
        out[..., 1 << i] = coeffs[..., i]
    return out


def _scalar(c, n: int) -> np.ndarray:
    c = np.asarray(c, dtype=complex)
    out = np.zeros(c.shape + (1 << n,), dtype=complex)
    out[..., 0] = c
    return out


def g_function(z) -> np.ndarray:
    """g(z) = (e^z - 1)/z with g(0) = 1."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-3
    zs = np.where(small, 1.0, z)
    series = 1 + z / 2 + z**2 / 6 + z**3 / 24 + z**4 / 120
    return np.where(small, series, np.expm1(zs) / zs)


def g_prime(z) -> np.ndarray:
    """g'(z) = (z e^z - e^z + 1)/z^2 with g'(0) = 1/2."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-3
    zs = np.where(small, 1.0, z)
    series = 0.5 + z / 3 + z**2 / 8 + z**3 / 30 + z**4 / 144
    return np.where(small, series, (zs * np.exp(zs) - np.expm1(zs)) / zs**2)


def boundary_value_oracle(Q: gen.TestDensity, sign: int) -> complex:
    """<1/(X + sign i0), Q> = PV int Q/X - sign i pi Q(0), by direct adaptive quadrature."""
    lo, hi = Q.support_box()
    a = float(max(abs(lo[0]), abs(hi[0])))
    pv = scipy.integrate.quad(lambda x: (Q(np.array([[x]]))[0] - Q(np.array([[-x]]))[0]) / x, 0.0, a,
                              epsabs=1e-14, epsrel=1e-13, limit=2000)[0]
    return complex(pv - sign * 1j * np.pi * Q(np.zeros((1, 1)))[0])


# ---------------------------------------------------------------------------
# the case record


@dataclass(frozen=True)
class ExampleCase:
    """A charted action with one-form, symbol, superconnection and oracles.

    ``specs`` holds every superconnection the case exercises (the first
    entry is the main one); ``oracles`` map names to closed-form evaluators;
    the sample grid is ``sample_points`` x ``sample_X`` x ``sample_t``.
    """

    name: str
    action: ChartedAction
    one_form: Optional[InvariantOneForm]
    symbol: ch.SymbolMorphism
    specs: dict
    oracles: dict
    sample_points: np.ndarray
    sample_X: np.ndarray
    sample_t: tuple = (0.5, 1.0, 2.0)
    tolerances: dict = field(default_factory=dict)
    anchors: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @property
    def spec(self) -> ch.SuperconnectionSpec:
        return next(iter(self.specs.values()))


# ---------------------------------------------------------------------------
# plane rotation


def _rotation_one_form(action: ChartedAction, scale: float = 1.0, name: str = "lambda") -> InvariantOneForm:
    """scale * (x dy - y dx)."""
    return one_form_field(
        action,
        lambda p: scale * np.stack([-p[..., 1], p[..., 0]], -1),
        lambda p: np.broadcast_to(scale * np.array([[0.0, 1.0], [-1.0, 0.0]]), p.shape[:-1] + (2, 2)),
        name=name,
    )


def plane_rotation_case() -> ExampleCase:
    """U(1) rotating R^2 minus the origin, VX = X(y d_x - x d_y), lambda = x dy - y dx."""
    act = ChartedAction(
        2, 1,
        lambda p: np.stack([p[..., 1], -p[..., 0]], -1)[..., None, :],
        domain=lambda p: np.sum(p**2, axis=-1) > 1e-12,
        name="plane-rotation",
    )
    lam = _rotation_one_form(act)
    spec = gen.trivial_spec(lam, "plane-rotation")

    def D_lambda(points, X):
        """2 dx^dy + X (x^2 + y^2)."""
        points = np.asarray(points, dtype=float)
        X = np.asarray(X, dtype=float)
        r2 = np.sum(points**2, axis=-1)
        lead = np.broadcast_shapes(r2.shape, X.shape[:-1])
        out = np.zeros(lead + (4,))
        out[..., 0] = X[..., 0] * r2
        out[..., 3] = 2.0
        return out

    def beta_form(points):
        """(x dy - y dx)/(x^2 + y^2), the form multiplying 1/(X + i0)."""
        points = np.asarray(points, dtype=float)
        r2 = np.sum(points**2, axis=-1)
        return _one_form(np.stack([-points[..., 1] / r2, points[..., 0] / r2], -1), 2)

    def beta_pairing(Q, points):
        return boundary_value_oracle(Q, +1) * beta_form(points)

    def localization_residual(Q, T, r):
        """Residual of the paired localization identity: |Q^(-T r^2)| (1 + 2T) for a Gaussian Q."""
        s = np.array([[-T * r * r]])
        return float(np.abs(Q.fourier(s))[0] * (1 + 2 * T))

    pts = np.array([[1.0, 0.0], [0.0, 1.0], [0.6, -0.8], [-1.2, 0.5]])
    return ExampleCase(
        "plane_rotation", act, lam, ch.zero_symbol(), {"trivial": spec},
        {"D_lambda": D_lambda, "beta_form": beta_form, "beta_pairing": beta_pairing,
         "localization_residual": localization_residual},
        pts, np.array([[-1.5], [0.3], [2.0]]),
        tolerances={"localization": 1e-4, "D_lambda": 1e-13, "beta": 1e-4},
        anchors={"D_lambda": "Dλ = 2dx∧dy + X(x²+y²)",
                 "localization": "1 = D(β(λ)) outside C_λ",
                 "beta": "β(λ) = 1/(X+i0) (xdy−ydx)/(x²+y²)"},
        extra={"density": gen.TestDensity.gaussian([1.0], 0.2, name="gauss(1,0.2)"),
               "localization_point": np.array([1.0, 0.0])},
    )


# ---------------------------------------------------------------------------
# cotangent bundle of the circle


def cotangent_circle_case() -> ExampleCase:
    """T*S^1 with chart (theta, xi), U(1) rotating theta, Liouville form -xi dtheta."""
    act = ChartedAction(
        2, 1,
        lambda p: np.broadcast_to(np.array([[-1.0, 0.0]]), p.shape[:-1] + (1, 2)),
        cotangent_base_dim=1,
        name="cotangent-circle",
    )
    lam = liouville_data(act)
    spec = gen.trivial_spec(lam, "cotangent-circle")

    def D_lambda(points, X):
        """dtheta^dxi - X xi."""
        points = np.asarray(points, dtype=float)
        X = np.asarray(X, dtype=float)
        xi = points[..., 1]
        lead = np.broadcast_shapes(xi.shape, X.shape[:-1])
        out = np.zeros(lead + (4,))
        out[..., 0] = -X[..., 0] * xi
        out[..., 3] = 1.0
        return out

    def beta_pairing(Q, points):
        """1/(X - i0) dtheta for xi > 0 and 1/(X + i0) dtheta for xi < 0."""
        points = np.asarray(points, dtype=float)
        xi = points[..., 1]
        dtheta = _one_form(np.stack([np.ones_like(xi), np.zeros_like(xi)], -1), 2)
        val = np.where(xi > 0, boundary_value_oracle(Q, -1), boundary_value_oracle(Q, +1))
        return val[..., None] * dtheta

    pts = np.array([[0.3, 1.0], [1.7, -1.0], [-2.0, 2.0], [0.0, 0.5]])
    return ExampleCase(
        "cotangent_circle", act, lam, ch.zero_symbol(), {"trivial": spec},
        {"D_lambda": D_lambda, "beta_pairing": beta_pairing},
        pts, np.array([[-1.5], [0.3], [2.0]]),
        tolerances={"localization": 1e-4, "D_lambda": 1e-13},
        anchors={"D_lambda": "Dλ = dθdξ − Xξ",
                 "localization": "1 = D(β(λ)) outside C_λ",
                 "beta": "β(λ)(X) = 1/(X−i0) dθ if ξ>0"},
        extra={"density": gen.TestDensity.gaussian([1.0], 0.2, name="gauss(1,0.2)"),
               "localization_point": np.array([0.3, 1.0])},
    )


# ---------------------------------------------------------------------------
# Atiyah symbol on C^2

# real chart (a, b, c, d) with xi1 = a + ib, xi2 = c + id
_DZ1 = np.array([-1j, 1.0, 1.0, 1j])  # z1 = xi2 - i xi1
_DZ2 = np.array([1j, -1.0, 1.0, 1j])  # z2 = xi2 + i xi1


def atiyah_z(points) -> tuple[np.ndarray, np.ndarray]:
    """(z1, z2) = (xi2 - i xi1, xi2 + i xi1)."""
    a, b, c, d = np.moveaxis(np.asarray(points, dtype=float), -1, 0)
    return (c + b) + 1j * (d - a), (c - b) + 1j * (d + a)


def _atiyah_generators(p):
    a, b, c, d = np.moveaxis(p, -1, 0)
    return np.stack([b, -a, d, -c], -1)[..., None, :]


def _atiyah_symbol_jac(p):
    out = np.zeros(p.shape[:-1] + (4, 1, 1), dtype=complex)
    out[..., :, 0, 0] = _DZ1
    return out


def _dz_dzbar(dz: np.ndarray) -> np.ndarray:
    """Coefficients of dz ^ d(conj z) for a constant one-form dz on R^4."""
    return wedge(_one_form(dz, 4), _one_form(np.conj(dz), 4))


def atiyah_case() -> ExampleCase:
    """Atiyah symbol sigma(xi) = xi2 - i xi1 between the weight-0 and weight-1 lines.

    U(1) acts by xi -> -i theta xi; lambda is the Liouville form c da + d db.
    """
    act = ChartedAction(4, 1, _atiyah_generators, name="atiyah")

    def lam_jac(p):
        J = np.zeros(p.shape[:-1] + (4, 4))
        J[..., 2, 0] = 1.0
        J[..., 3, 1] = 1.0
        return J

    zero = lambda p: np.zeros(p.shape[:-1])
    lam = one_form_field(act, lambda p: np.stack([p[..., 2], p[..., 3], zero(p), zero(p)], -1), lam_jac,
                         name="liouville")
    sym = ch.SymbolMorphism(1, 1, lambda p: atiyah_z(p)[0][..., None, None], jacobian=_atiyah_symbol_jac,
                            name="atiyah")
    weights = ch.linear_moment(np.array([[[0.0, 0.0], [0.0, 1j]]]))
    full = ch.SuperconnectionSpec(act, sym, lam, fibre_moment=weights, name="atiyah")
    sigma_only = ch.SuperconnectionSpec(act, sym, None, fibre_moment=weights, name="atiyah-sigma")
    dzz = _dz_dzbar(_DZ1)
    one = _scalar(1.0, 4)

    def exp_curvature(t, theta, point):
        """Closed form of e^{F_t(i theta)} without the one-form, shape (16, 2, 2)."""
        z1, _ = atiyah_z(point)
        z = 1j * theta
        g, gp = g_function(z), g_prime(z)
        out = np.zeros((16, 2, 2), dtype=complex)
        out[:, 0, 0] = one + (gp - g) * t**2 * dzz
        out[:, 0, 1] = 1j * t * g * np.conj(_one_form(_DZ1, 4))
        out[:, 1, 0] = 1j * t * g * _one_form(_DZ1, 4)
        out[:, 1, 1] = np.exp(z) * one + gp * t**2 * dzz
        return out * np.exp(-(t**2) * abs(z1) ** 2)

    def f_lambda(points):
        a, b, c, d = np.moveaxis(np.asarray(points, dtype=float), -1, 0)
        return b * c - a * d

    def d_lambda():
        """dc^da + dd^db."""
        out = np.zeros(16)
        out[0b0101] = -1.0
        out[0b1010] = -1.0
        return out

    def D_lambda(points, X):
        points = np.asarray(points, dtype=float)
        X = np.asarray(X, dtype=float)
        f = f_lambda(points)
        lead = np.broadcast_shapes(f.shape, X.shape[:-1])
        out = np.broadcast_to(d_lambda(), lead + (16,)).astype(complex)
        out[..., 0] = -X[..., 0] * f
        return out

    def D_lambda_z(points, X):
        """The same form through z-coordinates: theta(|z2|^2 - |z1|^2)/4 - (i/4)(dz1 dz1bar - dz2 dz2bar)."""
        z1, z2 = atiyah_z(points)
        X = np.asarray(X, dtype=float)
        two = -0.25j * (_dz_dzbar(_DZ1) - _dz_dzbar(_DZ2))
        lead = np.broadcast_shapes(z1.shape, X.shape[:-1])
        out = np.broadcast_to(two, lead + (16,)).astype(complex)
        out[..., 0] = X[..., 0] * (abs(z2) ** 2 - abs(z1) ** 2) / 4
        return out

    def exp_it_D_lambda(t, theta, point):
        dl = t * d_lambda()
        e2 = one + 1j * dl + 0.5 * (1j) ** 2 * wedge(dl, dl)
        return np.exp(-1j * t * theta * f_lambda(point)) * e2

    def str_exp(t, theta, point):
        E = exp_curvature(t, theta, point)
        return E[:, 0, 0] - E[:, 1, 1]

    def chern(t, theta, point):
        """Ch(sigma, lambda, t)(i theta) = e^{it D lambda} Str e^{F_t}."""
        return wedge(exp_it_D_lambda(t, theta, point), str_exp(t, theta, point))

    def transgression(t, theta, point):
        """e^{it D lambda} [t g (z1 dz1bar - z1bar dz1) e^{-t^2|z1|^2} - i lambda Str e^{F_t}]."""
        point = np.asarray(point, dtype=float)
        z1, _ = atiyah_z(point)
        g = g_function(1j * theta)
        dz = _one_form(_DZ1, 4)
        sym_part = t * g * (z1 * np.conj(dz) - np.conj(z1) * dz) * np.exp(-(t**2) * abs(z1) ** 2)
        a, b, c, d = point
        lam_form = _one_form(np.array([c, d, 0.0, 0.0]), 4)
        inner = sym_part - 1j * wedge(lam_form, str_exp(t, theta, point))
        return wedge(exp_it_D_lambda(t, theta, point), inner)

    def inequality_margin(points):
        """h_sigma + |f_lambda|^2 - |xi|^2/2, written in the real coordinates."""
        points = np.asarray(points, dtype=float)
        a, b, c, d = np.moveaxis(points, -1, 0)
        h = (c + b) ** 2 + (d - a) ** 2
        return h + (b * c - a * d) ** 2 - 0.5 * np.sum(points**2, axis=-1)

    rng_pts = np.array([[0.3, -0.2, 0.5, 0.4], [1.0, 0.7, -0.3, 0.1], [-0.5, 0.2, 0.8, -0.9]])
    return ExampleCase(
        "atiyah", act, lam, sym, {"full": full, "sigma": sigma_only},
        {"exp_curvature": exp_curvature, "chern": chern, "transgression": transgression,
         "D_lambda": D_lambda, "D_lambda_z": D_lambda_z, "inequality_margin": inequality_margin,
         "f_lambda": f_lambda},
        rng_pts, np.array([[-1.3], [0.4], [2.2]]),
        tolerances={"exp_curvature": 1e-10, "inequality": 0.0, "decay_exponent": -6.0,
                    "gaussian_slope": 0.05},
        anchors={"exp_curvature": "g(z) = (e^z−1)/z",
                 "inequality": "h_σ + ‖f_λ‖² ≥ ½‖ξ‖²",
                 "decay": "≤ cst(q)/(1+t²‖ξ‖²)^q",
                 "gaussian": "α(θ,z)e^{−|z₁|²}"},
        extra={"decay_density": gen.TestDensity.gaussian([1.0], 0.0375, name="gauss(1,0.0375)"),
               "decay_radii": np.geomspace(1.0, 20.0, 41), "decay_R": np.sqrt(2.0)},
    )


def atiyah_inequality_grid(n_per_axis: int = 10) -> np.ndarray:
    """|xi|^2 in [2, 100] times three hyperspherical angles, n^4 points of R^4."""
    R = np.linspace(2.0, 100.0, n_per_axis)
    a1 = np.linspace(0.0, np.pi, n_per_axis)
    a2 = np.linspace(0.0, np.pi, n_per_axis)
    a3 = np.linspace(0.0, 2 * np.pi, n_per_axis, endpoint=False)
    R, a1, a2, a3 = (g.reshape(-1) for g in np.meshgrid(R, a1, a2, a3, indexing="ij"))
    r = np.sqrt(R)
    return np.stack([
        r * np.cos(a1),
        r * np.sin(a1) * np.cos(a2),
        r * np.sin(a1) * np.sin(a2) * np.cos(a3),
        r * np.sin(a1) * np.sin(a2) * np.sin(a3),
    ], -1)


# ---------------------------------------------------------------------------
# mean rapid decay


@dataclass(frozen=True)
class DecayTable:
    radius: np.ndarray
    norm: np.ndarray
    flagged: np.ndarray  # True below the radius R of the decay assumption


def _paired_chern_norms(spec, Q: gen.TestDensity, points: np.ndarray, order: int) -> np.ndarray:
    nodes, w = Q.rule(order)
    W = gen._weights(Q, nodes, w, False)
    vals = gen._pair(gen.engine_chern(spec)(points)(1.0, nodes), W)[..., 0, :]
    return np.abs(vals).sum(axis=-1)


def mean_decay_profile(case: ExampleCase, Q: gen.TestDensity | None = None, radii=None,
                       order: int = 256) -> DecayTable:
    """Norm of int Ch(sigma, lambda, 1)(X) Q(X) dX along the z2-axis (z1 = 0) at |xi| = r.

    The decay assumption h_sigma + |f_lambda|^2 >= |xi|^2/2 beyond R is checked
    on the sampled points first; rows with r < R are flagged.
    """
    if case.name != "atiyah":
        raise ValueError("the decay profile is defined for the Atiyah case")
    Q = Q or case.extra["decay_density"]
    radii = np.asarray(case.extra["decay_radii"] if radii is None else radii, dtype=float)
    R = case.extra["decay_R"]
    # xi2 = i xi1 puts the point on z1 = 0
    s = radii / np.sqrt(2.0)
    pts = np.stack([s, np.zeros_like(s), np.zeros_like(s), s], -1)
    flagged = radii < R
    margin = case.oracles["inequality_margin"](pts[~flagged])
    if np.any(margin < -1e-12 * (1 + radii[~flagged] ** 2)):
        raise ValueError("decay assumption fails on the sampled points")
    return DecayTable(radii, _paired_chern_norms(case.spec, Q, pts, order), flagged)


def gaussian_profile(case: ExampleCase, Q: gen.TestDensity | None = None, moduli=None,
                     angle: float = 0.7, order: int = 256):
    """(|z1|^2, norm) along |z2| = |z1|, where the phase is constant."""
    Q = Q or case.extra["decay_density"]
    s = np.asarray(np.linspace(0.5, 3.0, 20) if moduli is None else moduli, dtype=float)
    pts = np.stack([s * np.cos(angle), np.zeros_like(s), s * np.sin(angle), np.zeros_like(s)], -1)
    z1, z2 = atiyah_z(pts)
    if not np.allclose(abs(z1), abs(z2)):
        raise AssertionError("profile left the constant-phase set")
    return abs(z1) ** 2, _paired_chern_norms(case.spec, Q, pts, order)


# ---------------------------------------------------------------------------
# exact symplectic vector space


def exact_symplectic_case(weight: float = 1.0) -> ExampleCase:
    """V = C with the weight-w U(1) action, omega = (x dy - y dx)/2, Omega = dx^dy."""
    act = ChartedAction(
        2, 1,
        lambda p: weight * np.stack([p[..., 1], -p[..., 0]], -1)[..., None, :],
        metric=lambda p: np.broadcast_to(np.eye(2), p.shape[:-1] + (2, 2)),
        name=f"symplectic(w={weight:g})",
    )
    omega = _rotation_one_form(act, 0.5, "omega")
    spec = gen.trivial_spec(omega, "symplectic")

    def moment(points):
        """Phi_K(v) = w |v|^2 / 2 from Omega(X v, v)/2 with X v = i w v."""
        points = np.asarray(points, dtype=float)
        x, y = points[..., 0], points[..., 1]
        Xv = weight * np.stack([-y, x], -1)  # i w v in real form
        return (0.5 * (Xv[..., 0] * y - Xv[..., 1] * x) * -1)[..., None]

    def kirwan_norm2(points):
        r2 = np.sum(np.asarray(points, dtype=float) ** 2, axis=-1)
        return 0.25 * weight**4 * r2**3

    def theta_pairing(Q):
        """<Theta, Q> = -(2 pi / w) <1/(X + i0), Q>."""
        return -(2 * np.pi / weight) * boundary_value_oracle(Q, +1)

    pts = np.array([[1.0, 0.0], [0.3, -0.7], [-1.1, 0.4]])
    return ExampleCase(
        "exact_symplectic", act, omega, ch.zero_symbol(), {"trivial": spec},
        {"moment": moment, "kirwan_norm2": kirwan_norm2, "theta_pairing": theta_pairing},
        pts, np.array([[-1.5], [0.3], [2.0]]),
        tolerances={"theta": 1e-4},
        anchors={"theta": "Θ(X) := iⁿ∫_V e^{i⟨Φ_K(v),X⟩}dv",
                 "kirwan": "Cr(‖Φ‖²) = Φ^{-1}(0)"},
        extra={"weight": weight,
               "densities": (gen.TestDensity.gaussian([1.0], 0.3, name="gauss(1,0.3)"),
                             gen.TestDensity.bump([0.5], 1.0, name="bump(0.5,1)"),
                             gen.TestDensity.gaussian([-0.4], 0.5, cut=6.0, name="gauss(-0.4,0.5)"))},
    )


# ---------------------------------------------------------------------------
# torus: sum of two one-forms


def torus_case() -> ExampleCase:
    """T*T^2 with chart (theta1, theta2, xi1, xi2); lambda = -xi1 dtheta1, mu = -xi2 dtheta2."""
    gens = np.array([[-1.0, 0.0, 0.0, 0.0], [0.0, -1.0, 0.0, 0.0]])
    act = ChartedAction(4, 2, lambda p: np.broadcast_to(gens, p.shape[:-1] + (2, 4)),
                        cotangent_base_dim=2, name="torus")

    def make(i, name):
        def comps(p):
            out = np.zeros(p.shape)
            out[..., i] = -p[..., 2 + i]
            return out

        def jac(p):
            J = np.zeros(p.shape[:-1] + (4, 4))
            J[..., 2 + i, i] = -1.0
            return J

        return one_form_field(act, comps, jac, name=name)

    lam, mu = make(0, "lambda"), make(1, "mu")

    def moments(points):
        """(f_lambda, f_mu) on the Lie basis: (xi1, 0) and (0, xi2)."""
        points = np.asarray(points, dtype=float)
        z = np.zeros(points.shape[:-1])
        return np.stack([points[..., 2], z], -1), np.stack([z, points[..., 3]], -1)

    def D_sum(points, X):
        """D(lambda + mu) = dtheta1^dxi1 + dtheta2^dxi2 - X1 xi1 - X2 xi2."""
        points = np.asarray(points, dtype=float)
        X = np.asarray(X, dtype=float)
        lead = np.broadcast_shapes(points.shape[:-1], X.shape[:-1])
        out = np.zeros(lead + (16,))
        out[..., 0] = -X[..., 0] * points[..., 2] - X[..., 1] * points[..., 3]
        out[..., 0b0101] = 1.0
        out[..., 0b1010] = 1.0
        return out

    specs = {"lambda": gen.trivial_spec(lam, "lambda"), "mu": gen.trivial_spec(mu, "mu"),
             "lambda+mu": gen.trivial_spec(lam + mu, "lambda+mu")}
    return ExampleCase(
        "torus", act, lam, ch.zero_symbol(), specs,
        {"moments": moments, "D_sum": D_sum},
        np.array([[0.4, 1.1, 1.0, 0.3], [0.4, 1.1, 0.3, 1.0], [2.0, -0.5, -1.2, 0.7]]),
        np.array([[0.5, -1.0], [1.2, 0.8]]),
        tolerances={"sum_identity": 1e-3},
        anchors={"sum_identity": "D(I₁) = β(λ+μ)|_{U₁} − β₁(λ)"},
        extra={"mu": mu, "split": 1,
               "density": gen.TestDensity.gaussian([1.0, 1.0], 0.2, cut=6.0, name="gauss((1,1),0.2)"),
               "U1_point": np.array([0.4, 1.1, 1.0, 0.3]),
               "U2_point": np.array([0.4, 1.1, 0.3, 1.0])},
    )


# ---------------------------------------------------------------------------
# multiplicativity on R^2


def _radial_symbol(conj: bool, a: float, name: str) -> ch.SymbolMorphism:
    """z (r^2 - a), or its conjugate-variable twin zbar (r^2 - a), as a 1x1 symbol."""

    def w(p):
        z = p[..., 0] + 1j * p[..., 1]
        return np.conj(z) if conj else z

    def ev(p):
        r2 = np.sum(p**2, axis=-1)
        return (w(p) * (r2 - a))[..., None, None]

    def jac(p):
        r2 = np.sum(p**2, axis=-1)
        dy = -1j if conj else 1j
        jx = (r2 - a) + 2 * p[..., 0] * w(p)
        jy = dy * (r2 - a) + 2 * p[..., 1] * w(p)
        return np.stack([jx, jy], -1)[..., None, None]

    return ch.SymbolMorphism(1, 1, ev, jacobian=jac, name=name)


def multiplicativity_case() -> ExampleCase:
    """Two scalar symbols on R^2 with the rotation action.

    sigma1 = z (r^2 - 1/4) carries the one-form x dy - y dx; sigma2 = zbar (r^2 - 1)
    has none.  The fibre weights make both symbols equivariant.
    """
    act = ChartedAction(2, 1, lambda p: np.stack([p[..., 1], -p[..., 0]], -1)[..., None, :],
                        name="plane-rotation")
    lam = _rotation_one_form(act)
    s1 = _radial_symbol(False, 0.25, "z(r²-1/4)")
    s2 = _radial_symbol(True, 1.0, "zbar(r²-1)")
    spec1 = ch.SuperconnectionSpec(act, s1, lam, fibre_moment=ch.linear_moment(np.array([[[0, 0], [0, 1j]]])),
                                   name="sigma1")
    spec2 = ch.SuperconnectionSpec(act, s2, None, fibre_moment=ch.linear_moment(np.array([[[1j, 0], [0, 0]]])),
                                   name="sigma2")
    prod = ch.product_spec(spec1, spec2)

    def r(p):
        return np.sqrt(np.sum(np.asarray(p, dtype=float) ** 2, axis=-1))

    def grad_r(p):
        return np.asarray(p, dtype=float) / r(p)[..., None]

    phi1, phi2 = ch.partition_of_unity(
        lambda p: r(p) - 0.2, lambda p: np.abs(r(p) - 1.0) - 0.2, 2,
        grad_r, lambda p: np.sign(r(p) - 1.0)[..., None] * grad_r(p),
    )

    def h_product(points):
        """h of sigma1 ⊙ sigma2 = |sigma1|^2 + |sigma2|^2."""
        p = np.asarray(points, dtype=float)
        r2 = np.sum(p**2, axis=-1)
        return r2 * (r2 - 0.25) ** 2 + r2 * (r2 - 1.0) ** 2

    return ExampleCase(
        "multiplicativity", act, lam, s1, {"sigma1": spec1, "sigma2": spec2, "product": prod},
        {"h_product": h_product},
        np.array([[0.65, 0.0], [0.0, 1.3], [1.06, 1.06]]),
        np.array([[-1.5], [0.3], [2.0]]),
        tolerances={"fundamental": 1e-3},
        anchors={"fundamental": "c(σ₁)·c(σ₂) = c(σ₁⊙σ₂)"},
        extra={"phi1": phi1, "phi2": phi2,
               "density": gen.TestDensity.gaussian([1.0], 0.4, name="gauss(1,0.4)")},
    )


# ---------------------------------------------------------------------------
# catalog


CATALOG: dict[str, Callable[[], ExampleCase]] = {
    "plane_rotation": plane_rotation_case,
    "cotangent_circle": cotangent_circle_case,
    "atiyah": atiyah_case,
    "exact_symplectic": exact_symplectic_case,
    "torus": torus_case,
    "multiplicativity": multiplicativity_case,
}


def get_case(name: str) -> ExampleCase:
    try:
        return CATALOG[name]()
    except KeyError:
        raise KeyError(f"unknown example {name!r}; known: {', '.join(sorted(CATALOG))}") from None
