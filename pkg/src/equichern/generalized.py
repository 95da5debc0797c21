"""Generalized coefficients: pairing form families against test densities on the Lie algebra.

A family is given by a factory ``family(points) -> evaluator`` where
``evaluator(t, X)`` returns coefficients of shape ``(..., M, 2**m)`` for
``points`` of shape ``(..., m)`` and Lie algebra nodes ``X`` of shape
``(M, k)``.  The factory lets per-point data be computed once.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.integrate
import scipy.optimize
from numpy.polynomial import chebyshev as C
from numpy.polynomial import legendre as L

from . import algebra as alg
from . import chern as ch
from .calculus import (
    ChartedAction,
    InvariantOneForm,
    contract,
    derivatives_from_stencil,
    exterior_derivative_from_jacobian,
    stencil_points,
)

DEFAULT_ORDER = 64
MAX_ORDER = 512
ORDER_STABILITY = 1e-9
QUAD_EPSABS = 1e-11


# ---------------------------------------------------------------------------
# test densities


def _smooth_step(s):
    """1 for s <= 0, 0 for s >= 1, smooth in between."""
    a = ch.bump_rho(1.0 - np.asarray(s, dtype=float))
    b = ch.bump_rho(np.asarray(s, dtype=float))
    return a / (a + b)


@dataclass(frozen=True)
class TestDensity:
    """A smooth radial density supported in the ball |X - center| <= radius.

    ``kind="bump"``: amplitude * exp(-1/(1 - |u|^2)) with u = (X - center)/radius.
    ``kind="gaussian"``: amplitude * exp(-|X - center|^2/(2 width^2)), multiplied
    by a smooth cutoff that is 1 up to ``cut`` widths and 0 from 1.25 ``cut`` widths.
    """

    __test__ = False

    center: tuple
    radius: float
    kind: str = "bump"
    width: float = 1.0
    amplitude: float = 1.0
    cut: float = 0.0
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("bump", "gaussian"):
            raise ValueError(f"unknown density kind {self.kind!r}")
        if self.radius <= 0 or self.width <= 0:
            raise ValueError("radius and width must be positive")

    @classmethod
    def bump(cls, center, radius, amplitude=1.0, name="") -> "TestDensity":
        return cls(tuple(np.atleast_1d(np.asarray(center, dtype=float)).tolist()), float(radius), "bump",
                   1.0, amplitude, 0.0, name or "bump")

    @classmethod
    def gaussian(cls, center, width, cut=8.0, amplitude=1.0, name="") -> "TestDensity":
        c = tuple(np.atleast_1d(np.asarray(center, dtype=float)).tolist())
        return cls(c, 1.25 * cut * width, "gaussian", float(width), amplitude, float(cut), name or "gaussian")

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def c(self) -> np.ndarray:
        return np.asarray(self.center, dtype=float)

    def __call__(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        d = np.linalg.norm(X - self.c, axis=-1)
        if self.kind == "bump":
            u2 = (d / self.radius) ** 2
            out = np.zeros_like(d)
            inside = u2 < 1
            out[inside] = np.exp(-1.0 / (1.0 - u2[inside]))
            return self.amplitude * out
        s = (d / (self.width * self.cut) - 1.0) * 4.0
        return self.amplitude * np.exp(-0.5 * (d / self.width) ** 2) * _smooth_step(s)

    def contains(self, X) -> np.ndarray:
        return np.linalg.norm(np.asarray(X, dtype=float) - self.c, axis=-1) <= self.radius

    def support_box(self):
        return self.c - self.radius, self.c + self.radius

    def rule(self, order) -> tuple[np.ndarray, np.ndarray]:
        """Tensor Gauss-Legendre nodes (M, k) and weights (M,) on the support box."""
        orders = np.broadcast_to(np.atleast_1d(order), (self.dim,))
        lo, hi = self.support_box()
        grids, wts = [], []
        for a, n in enumerate(orders):
            x, w = _gauss_legendre(int(n))
            grids.append(lo[a] + (x + 1) * (hi[a] - lo[a]) / 2)
            wts.append(w * (hi[a] - lo[a]) / 2)
        nodes = np.stack(np.meshgrid(*grids, indexing="ij"), -1).reshape(-1, self.dim)
        weights = np.prod(np.stack(np.meshgrid(*wts, indexing="ij"), -1).reshape(-1, self.dim), axis=-1)
        return nodes, weights

    def mass(self, order=DEFAULT_ORDER) -> float:
        x, w = self.rule(order)
        return float(w @ self(x))

    def fourier(self, s, order=None) -> np.ndarray:
        """Q^(s) = int Q(X) e^{-i<s, X>} dX, s of shape (..., k).

        Analytic for Gaussians (the cutoff changes the value by less than
        exp(-cut^2/2) relative); Gauss-Legendre otherwise, with the order
        raised with |s|.
        """
        s = np.asarray(s, dtype=float)
        if s.ndim == 0 or s.shape[-1] != self.dim:
            s = s[..., None]
        if self.kind == "gaussian":
            k = self.dim
            return (
                self.amplitude
                * (2 * np.pi) ** (k / 2)
                * self.width**k
                * np.exp(-0.5 * self.width**2 * np.sum(s * s, axis=-1) - 1j * s @ self.c)
            )
        return self.fourier_numeric(s, order)

    def fourier_numeric(self, s, order=None) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if s.ndim == 0 or s.shape[-1] != self.dim:
            s = s[..., None]
        if order is None:
            order = int(min(4096, 64 + 1.5 * self.radius * np.abs(s).max()))
        x, w = self.rule(order)
        q = w * self(x)
        return np.exp(-1j * (s @ x.T)) @ q

    def seminorm(self, r: int, box=None, order: int = 160) -> float:
        """Estimate of ||Q||_{K,r}: sup over K of all partial derivatives of order <= r.

        Derivatives come from a Chebyshev interpolant on the support box
        (k <= 2); the sup is taken on a fine grid and inflated by 5%.
        """
        if self.dim > 2:
            raise ValueError("seminorm estimate implemented for dim <= 2")
        lo, hi = self.support_box()
        if box is not None:
            blo, bhi = (np.asarray(b, dtype=float) for b in box)
        else:
            blo, bhi = lo, hi
        x = np.cos(np.pi * (np.arange(order) + 0.5) / order)
        if self.dim == 1:
            vals = self(lo + (x[:, None] + 1) * (hi - lo) / 2)
            coef = C.chebfit(x, vals, order - 1)
            fine = np.linspace(-1, 1, 4001)
            fx = lo[0] + (fine + 1) * (hi[0] - lo[0]) / 2
            mask = (fx >= blo[0]) & (fx <= bhi[0])
            best = 0.0
            scale = 2.0 / (hi[0] - lo[0])
            cj = coef
            for j in range(r + 1):
                best = max(best, float(np.abs(C.chebval(fine[mask], cj)).max(initial=0.0)) * scale**j)
                cj = C.chebder(cj)
            return 1.05 * best
        X0, X1 = np.meshgrid(x, x, indexing="ij")
        pts = np.stack([lo[0] + (X0 + 1) * (hi[0] - lo[0]) / 2, lo[1] + (X1 + 1) * (hi[1] - lo[1]) / 2], -1)
        Vinv = np.linalg.inv(C.chebvander(x, order - 1))
        coef = Vinv @ self(pts) @ Vinv.T
        fine = np.linspace(-1, 1, 201)
        f0 = lo[0] + (fine + 1) * (hi[0] - lo[0]) / 2
        f1 = lo[1] + (fine + 1) * (hi[1] - lo[1]) / 2
        mask = ((f0 >= blo[0]) & (f0 <= bhi[0]))[:, None] & ((f1 >= blo[1]) & (f1 <= bhi[1]))[None, :]
        Vf = C.chebvander(fine, order - 1)
        sc = 2.0 / (hi - lo)
        best = 0.0
        for a in range(r + 1):
            for b in range(r + 1 - a):
                cab = C.chebder(C.chebder(coef, a, axis=0), b, axis=1)
                vals = Vf[:, : cab.shape[0]] @ cab @ Vf[:, : cab.shape[1]].T
                best = max(best, float(np.abs(vals[mask]).max(initial=0.0)) * sc[0] ** a * sc[1] ** b)
        return 1.05 * best


@lru_cache(maxsize=None)
def _gauss_legendre(n: int):
    x, w = L.leggauss(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


@dataclass(frozen=True)
class PairedValue:
    """The form int beta_T(X) Q(X) dX at a point, with quadrature diagnostics."""

    value: np.ndarray
    T: float
    tail_estimate: Optional[float]
    quad_error: float
    order: tuple = ()

    @property
    def tail_available(self) -> bool:
        return self.tail_estimate is not None

    def as_element(self, n_generators: int) -> alg.ExteriorElement:
        return alg.ExteriorElement(n_generators, self.value)


# ---------------------------------------------------------------------------
# families


def engine_transgression(spec: ch.SuperconnectionSpec):
    """Family t -> eta(sigma, lambda, A, t) from the Chern engine."""

    def factory(points):
        p = np.asarray(points, dtype=float)[..., None, :]
        data = ch.point_data(spec, p)
        return lambda t, X: ch.transgression_array(spec, t, X, p, data)

    return factory


def engine_chern(spec: ch.SuperconnectionSpec):
    """Family t -> Ch(sigma, lambda, A, t) from the Chern engine."""

    def factory(points):
        p = np.asarray(points, dtype=float)[..., None, :]
        data = ch.point_data(spec, p)
        return lambda t, X: ch.chern_array(spec, t, X, p, data)

    return factory


def trivial_spec(lam: InvariantOneForm, name: str = "") -> ch.SuperconnectionSpec:
    """Trivial line bundle, zero symbol, one-form lambda: Ch(t) = e^{it D lambda}."""
    return ch.SuperconnectionSpec(lam.action, ch.zero_symbol(), lam, name=name or f"[0],{lam.name}")


def _weights(Q: TestDensity, nodes: np.ndarray, w: np.ndarray, polynomial: bool) -> np.ndarray:
    """Rows: Q, and X_a Q for each a when ``polynomial``."""
    q = w * Q(nodes)
    if not polynomial:
        return q[None]
    return np.concatenate([q[None], q[None] * nodes.T], axis=0)


def _pair(vals: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """(..., M, N) against (W, M) -> (..., W, N)."""
    return np.einsum("wm,...mn->...wn", weights, vals)


def select_order(Q: TestDensity, evaluate: Callable[[np.ndarray, np.ndarray], np.ndarray],
                 start: int = DEFAULT_ORDER, cap: int = MAX_ORDER, tol: float = ORDER_STABILITY):
    """Double the Gauss order axis by axis until the paired value is stable to ``tol``.

    ``evaluate(nodes, weights)`` returns a paired array; the caller picks the
    probe, usually the family on ``probe_times`` since aliasing of the
    X-rule can strike at any intermediate t.
    Returns an int for one-dimensional Q, else a tuple of per-axis orders.
    """
    orders = [start] * Q.dim
    prev = evaluate(*Q.rule(orders))
    for a in range(Q.dim):
        while orders[a] < cap:
            trial = list(orders)
            trial[a] *= 2
            cur = evaluate(*Q.rule(trial))
            stable = np.abs(cur - prev).max() <= tol * (1.0 + np.abs(cur).max())
            if stable:
                break
            orders, prev = trial, cur
    return orders[0] if Q.dim == 1 else tuple(orders)


def probe_times(T: float, n: int = 16) -> np.ndarray:
    """Times at which order selection samples a family, shaped to broadcast over X nodes."""
    return np.linspace(0.0, T, n + 1)[1:, None]


def _empirical_tail(norm_at: Callable[[np.ndarray], np.ndarray], T: float) -> Optional[float]:
    """Tail of int_T^inf from a power-law fit over [T/2, T]; None if decay is too slow."""
    if T <= 0:
        return None
    ts = np.linspace(T / 2, T, 8)
    g = norm_at(ts)
    if np.any(g <= 0):
        return 0.0 if np.all(g == 0) else None
    slope = np.polyfit(np.log(ts), np.log(g), 1)[0]
    if slope >= -1.5:
        return None
    return float(g[-1] * T / (-slope - 1.0))


def pair_family_with_density(family, Q: TestDensity, T: float, point, order=None,
                             polynomial: bool = False, epsabs: float = QUAD_EPSABS,
                             t_start: float = 0.0) -> PairedValue:
    """int_{t_start}^T int Q(X) eta_t(X) dX dt at ``point`` (any leading batch shape).

    Inner X-integral: tensor Gauss-Legendre over the support box; outer
    t-integral: adaptive Gauss-Kronrod (``scipy.integrate.quad_vec``).  With
    ``polynomial`` the result also holds the pairings against X_a Q, stacked
    on a weights axis: value shape (..., 1 + k, 2**m); otherwise (..., 2**m).
    """
    if T < t_start:
        raise ValueError("T must be >= t_start")
    point = np.asarray(point, dtype=float)
    ev = family(point)
    if order is None:
        order = select_order(Q, lambda x, w: _pair(ev(probe_times(T), x), _weights(Q, x, w, polynomial)))
    nodes, w = Q.rule(order)
    W = _weights(Q, nodes, w, polynomial)

    def integrand(t):
        return _pair(ev(t, nodes), W)

    if T == t_start:
        val = np.zeros_like(integrand(t_start))
        err = 0.0
    else:
        val, err = scipy.integrate.quad_vec(integrand, t_start, T, epsabs=epsabs, epsrel=0.0,
                                            norm="max", limit=2000)
    tail = _empirical_tail(lambda ts: np.array([np.abs(integrand(t)).max() for t in ts]), T)
    if not polynomial:
        val = val[..., 0, :]
    return PairedValue(val, T, tail, float(err), tuple(np.atleast_1d(order).tolist()))


# ---------------------------------------------------------------------------
# paired D


def paired_D(pairings: Callable[[np.ndarray], np.ndarray], action: ChartedAction, point, h=None) -> np.ndarray:
    """int (D alpha)(X) Q(X) dX from the pairings of alpha against Q and X_a Q.

    ``pairings(points)`` returns (..., 1 + k, 2**m) and is evaluated once on
    the centre plus the difference stencil, so every point sees the same
    quadrature nodes.  Uses D = d - sum_a X_a ι(V_a).
    """
    point = np.asarray(point, dtype=float)
    stencil, h = stencil_points(point, h)
    m = point.shape[-1]
    allpts = np.concatenate([point[..., None, :], stencil.reshape(point.shape[:-1] + (4 * m, m))], axis=-2)
    vals = pairings(allpts)
    centre = vals[..., 0, :, :]
    sv = vals[..., 1:, :, :].reshape(point.shape[:-1] + (m, 4) + vals.shape[-2:])
    jac = derivatives_from_stencil(sv, h, 2)  # (..., m, W, N)
    d_alpha = exterior_derivative_from_jacobian(jac[..., 0, :], 0)
    V = action.generators(point)  # (..., k, m)
    out = d_alpha
    for a in range(action.lie_dim):
        out = out - contract(centre[..., 1 + a, :], V[..., a, :], 0)
    return out


def _unit(n: int) -> np.ndarray:
    e = np.zeros(1 << n)
    e[0] = 1.0
    return e


def form_norm(c: np.ndarray) -> float:
    """Sum of coefficient moduli (max over any batch)."""
    return float(np.abs(c).sum(axis=-1).max())


# ---------------------------------------------------------------------------
# boundary values


def boundary_value_pairing(Q: TestDensity, sign: int, route: str = "pv", tol: float = 1e-12) -> complex:
    """<1/(X + sign i0), Q> on a one-dimensional Lie algebra.

    ``route="pv"``: PV int Q/X dX - sign i pi Q(0).
    ``route="fourier"``: -sign i int_0^inf Q^(-sign t) dt, integrated until the
    transform has decayed below ``tol``.
    """
    if Q.dim != 1:
        raise ValueError("boundary values are implemented for one-dimensional Lie algebras")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if route == "pv":
        a = float(np.abs(Q.c[0]) + Q.radius)

        def odd_part(x):
            return (Q(np.array([[x]]))[0] - Q(np.array([[-x]]))[0]) / x

        brk = sorted({abs(Q.c[0] - Q.radius), abs(Q.c[0] + Q.radius)} - {0.0, a})
        pv, _ = scipy.integrate.quad(odd_part, 0.0, a, points=brk or None, epsabs=1e-14, epsrel=1e-13, limit=500)
        return complex(pv - sign * 1j * np.pi * Q(np.zeros((1, 1)))[0])
    if route == "fourier":
        Tf = fourier_cutoff(Q, tol)

        def qhat(t):
            return Q.fourier(np.array([[-sign * t]]), order=int(64 + 1.5 * Q.radius * Tf))[0]

        re, _ = scipy.integrate.quad(lambda t: qhat(t).real, 0.0, Tf, epsabs=1e-13, epsrel=1e-13, limit=5000)
        im, _ = scipy.integrate.quad(lambda t: qhat(t).imag, 0.0, Tf, epsabs=1e-13, epsrel=1e-13, limit=5000)
        return complex(-sign * 1j * (re + 1j * im))
    raise ValueError(f"unknown route {route!r}")


def fourier_cutoff(Q: TestDensity, tol: float) -> float:
    """A frequency beyond which |Q^| stays below ``tol`` times its mass on sampled windows."""
    scale = abs(Q.mass()) or 1.0
    T = 8.0 / Q.radius
    for _ in range(40):
        s = np.linspace(T, 2 * T, 64)
        if np.abs(Q.fourier(s[:, None])).max() <= tol * scale:
            return T
        T *= 1.5
    raise RuntimeError("test density transform does not decay below the requested tolerance")


# ---------------------------------------------------------------------------
# non-abelian localization


def localization_residual(lam: InvariantOneForm, Q: TestDensity, T: float, point, delta: float = 1e-3,
                          order=None) -> float:
    """|| int (D beta_T(lambda)(X) - 1) Q(X) dX || at ``point``.

    beta_T(lambda) is the engine transgression of the trivial line bundle with
    the zero symbol, integrated over [0, T].
    """
    point = np.asarray(point, dtype=float)
    if np.linalg.norm(lam.moment(point)) < delta:
        raise ValueError("point too close to the critical set of lambda")
    spec = trivial_spec(lam)
    fam = engine_transgression(spec)
    if order is None:
        ev = fam(point)
        order = select_order(Q, lambda x, w: _pair(ev(probe_times(T), x), _weights(Q, x, w, True)))

    def pairings(pts):
        return pair_family_with_density(fam, Q, T, pts, order=order, polynomial=True, epsabs=1e-13).value

    Db = paired_D(pairings, lam.action, point)
    nodes, w = Q.rule(order)
    Db[..., 0] -= w @ Q(nodes)
    return form_norm(Db)


# ---------------------------------------------------------------------------
# composite Gauss-Legendre rule in time with cumulative integrals


@dataclass(frozen=True)
class TimeRule:
    """Composite Gauss-Legendre rule on the panels ``edges`` with spectral cumulative integration."""

    edges: tuple
    nodes_per_panel: int

    @property
    def T(self) -> float:
        return self.edges[-1]

    @property
    def panels(self) -> int:
        return len(self.edges) - 1

    def panel_nodes(self, p: int):
        x, w = _gauss_legendre(self.nodes_per_panel)
        a, b = self.edges[p], self.edges[p + 1]
        return a + (x + 1) * (b - a) / 2, w * (b - a) / 2

    def cumulative_matrix(self, p: int) -> np.ndarray:
        """C[i, j] = int_a^{t_i} l_j for the Lagrange basis of panel p."""
        return _cumulative_matrix(self.nodes_per_panel) * (self.edges[p + 1] - self.edges[p]) / 2

    def nodes(self):
        ts, ws = zip(*(self.panel_nodes(p) for p in range(self.panels)))
        return np.concatenate(ts), np.concatenate(ws)


@lru_cache(maxsize=None)
def _cumulative_matrix(m: int) -> np.ndarray:
    x, _ = _gauss_legendre(m)
    V = L.legvander(x, m - 1)
    Vinv = np.linalg.inv(V)
    out = np.zeros((m, m))
    for k in range(m):
        ck = np.zeros(m)
        ck[k] = 1.0
        out[:, :] += np.outer(L.legval(x, L.legint(ck, lbnd=-1)), Vinv[k])
    return out


def time_rule(T: float, max_panel: float = 2.5, nodes: int = 16, first_panel: float | None = None,
              growth: float = 1.5) -> TimeRule:
    """Panels of width at most ``max_panel``; with ``first_panel`` the widths
    start there and grow geometrically, resolving fast Gaussian decay near 0."""
    T = float(T)
    if first_panel is None or first_panel >= max_panel:
        k = max(1, int(np.ceil(T / max_panel)))
        return TimeRule(tuple(np.linspace(0.0, T, k + 1)), nodes)
    edges = [0.0]
    width = first_panel
    while edges[-1] + width < T:
        edges.append(edges[-1] + width)
        width = min(width * growth, max_panel)
    edges.append(T)
    return TimeRule(tuple(edges), nodes)


def gaussian_first_panel(rate: float) -> float | None:
    """First panel width for integrands decaying like exp(-rate t^2)."""
    return 0.5 / np.sqrt(rate) if rate > 0 else None


# ---------------------------------------------------------------------------
# sum of one-forms


def _split_norms(f: np.ndarray, split: int) -> tuple[np.ndarray, np.ndarray]:
    return np.linalg.norm(f[..., :split], axis=-1), np.linalg.norm(f[..., split:], axis=-1)


def one_form_region(lam: InvariantOneForm, mu: InvariantOneForm, split: int, point) -> int:
    """1 if the point lies in U_1 = {|f_mu^1| < |f_lambda^1|}, 2 if in U_2, else 0."""
    fl1, fl2 = _split_norms(lam.moment(point), split)
    fm1, fm2 = _split_norms(mu.moment(point), split)
    if np.all(fm1 < fl1):
        return 1
    if np.all(fl2 < fm2):
        return 2
    return 0


POINT_CHUNK = 3


def one_form_sum_identity_residual(lam: InvariantOneForm, mu: InvariantOneForm, split: int, Q: TestDensity,
                                   S: float, point, region: int | None = None, order=None,
                                   rule: TimeRule | None = None) -> float:
    """Paired residual of D(I_1) - beta(lambda + mu) + beta(lambda) on U_1,
    or of D(I_2) + beta(lambda + mu) - beta(mu) on U_2, truncated at S.

    ``split`` is the dimension of the first factor of the Lie algebra; Q lives
    on the full Lie algebra.  I_1 is integrated over 0 <= t <= s <= S (I_2
    over s <= t) with a composite Gauss rule whose inner integral is the
    spectral cumulative integral on the same nodes.
    """
    point = np.asarray(point, dtype=float)
    found = one_form_region(lam, mu, split, point)
    if found == 0:
        raise ValueError("point lies in neither U_1 nor U_2")
    region = found if region is None else region
    fl1, fl2 = _split_norms(lam.moment(point), split)
    fm1, fm2 = _split_norms(mu.moment(point), split)
    if (region == 1 and not np.all(fm1 < fl1)) or (region == 2 and not np.all(fl2 < fm2)):
        raise ValueError(f"point is not in U_{region}")
    f1 = engine_transgression(trivial_spec(lam))
    f2 = engine_transgression(trivial_spec(mu))
    f12 = engine_transgression(trivial_spec(lam + mu))
    if order is None:
        e1, e2, e12 = f1(point), f2(point), f12(point)

        def probe(x, w):
            W = _weights(Q, x, w, False)
            return np.concatenate([_pair(e(probe_times(S, 8), x), W) for e in (e1, e2, e12)], axis=-2)

        order = select_order(Q, probe)
    nodes, w = Q.rule(order)
    W = _weights(Q, nodes, w, True)
    rule = rule or time_rule(S, max_panel=5.0, nodes=20)

    def I_pairings(pts):
        # bounded memory: a few stencil points at a time
        return np.concatenate([I_chunk(pts[i : i + POINT_CHUNK]) for i in range(0, len(pts), POINT_CHUNK)])

    def I_chunk(pts):
        ev1, ev2 = f1(pts), f2(pts)
        B = 0.0  # running integral of the inner family at each X node
        I = 0.0
        for p in range(rule.panels):
            ts, ws = rule.panel_nodes(p)
            e1v = np.stack([ev1(t, nodes) for t in ts])
            e2v = np.stack([ev2(t, nodes) for t in ts])
            inn = e2v if region == 1 else e1v
            Bn = B + np.einsum("ij,j...->i...", rule.cumulative_matrix(p), inn)
            # I_1 = int eta_1(s) ^ int_0^s eta_2 ;  I_2 = int (int_0^t eta_1) ^ eta_2(t)
            prod = alg.lam_mul(e1v, Bn) if region == 1 else alg.lam_mul(Bn, e2v)
            I = I + np.einsum("i,i...->...", ws, prod)
            B = B + np.einsum("i,i...->...", ws, inn)
        return _pair(I, W)

    DI = paired_D(I_pairings, lam.action, point)
    ev1, ev2, ev12 = f1(point), f2(point), f12(point)
    b1 = b2 = b12 = 0.0
    for p in range(rule.panels):
        ts, ws = rule.panel_nodes(p)
        for t, wt in zip(ts, ws):
            b1 = b1 + wt * ev1(t, nodes)
            b2 = b2 + wt * ev2(t, nodes)
            b12 = b12 + wt * ev12(t, nodes)
    q = W[:1]
    b1, b2, b12 = (_pair(b, q)[..., 0, :] for b in (b1, b2, b12))
    res = DI - b12 + b1 if region == 1 else DI + b12 - b2
    return form_norm(res)


# ---------------------------------------------------------------------------
# multiplicativity


def multiplicativity_residual(spec1: ch.SuperconnectionSpec, spec2: ch.SuperconnectionSpec,
                              phi1: Callable, Q: TestDensity, T: float, point, order=None,
                              rule: TimeRule | None = None, return_parts: bool = False):
    """Paired residual of -D(I_Phi) - (Phi_1 beta_1 c_2(0) + c_1(0) Phi_2 beta_2 - dPhi_1 beta_1 beta_2 - beta_12).

    All transgressions are truncated at T.  beta_12 comes from the engine
    applied to the product superconnection, independently of the factors.
    ``phi1`` is a FormField (0-form) for Phi_1; Phi_2 = 1 - Phi_1.
    """
    point = np.asarray(point, dtype=float)
    prod = ch.product_spec(spec1, spec2)
    fam1, fam2, fam12 = (engine_transgression(s) for s in (spec1, spec2, prod))
    ch1, ch2 = engine_chern(spec1), engine_chern(spec2)
    action = spec1.action
    if order is None:
        e1, e2, e12 = fam1(point), fam2(point), fam12(point)

        def probe(x, w):
            W = _weights(Q, x, w, False)
            return np.concatenate([_pair(e(probe_times(T, 8), x), W) for e in (e1, e2, e12)], axis=-2)

        order = select_order(Q, probe)
    nodes, w = Q.rule(order)
    W = _weights(Q, nodes, w, True)
    if rule is None:
        rate = max(float(np.max(ch.h_sigma(s.symbol, point))) for s in (spec1, spec2, prod))
        rule = time_rule(T, first_panel=gaussian_first_panel(rate))
    n = action.chart_dim
    zx = np.zeros(action.lie_dim)

    def pieces(pts):
        ev1, ev2, ev12 = fam1(pts), fam2(pts), fam12(pts)
        B1 = B2 = 0.0
        I1 = I2 = 0.0
        b12 = 0.0
        for p in range(rule.panels):
            ts, ws = rule.panel_nodes(p)
            e1v = np.stack([ev1(t, nodes) for t in ts])
            e2v = np.stack([ev2(t, nodes) for t in ts])
            e12v = np.stack([ev12(t, nodes) for t in ts])
            Cm = rule.cumulative_matrix(p)
            B1n = B1 + np.einsum("ij,j...->i...", Cm, e1v)
            B2n = B2 + np.einsum("ij,j...->i...", Cm, e2v)
            I1 = I1 + np.einsum("i,i...->...", ws, alg.lam_mul(e1v, B2n))
            I2 = I2 + np.einsum("i,i...->...", ws, alg.lam_mul(B1n, e2v))
            b12 = b12 + np.einsum("i,i...->...", ws, e12v)
            B1 = B1 + np.einsum("i,i...->...", ws, e1v)
            B2 = B2 + np.einsum("i,i...->...", ws, e2v)
        return ev1, ev2, I1, I2, B1, B2, b12

    def phi_vals(pts):
        return np.asarray(phi1(pts, np.zeros(pts.shape[:-1] + (action.lie_dim,))))

    cache = {}

    def IPhi(pts):
        _, _, I1, I2, B1, B2, b12 = pieces(pts)
        f1 = phi_vals(pts)[..., None, :]
        f2 = -f1
        f2[..., 0] += 1.0
        val = alg.lam_mul(f1, I1) - alg.lam_mul(f2, I2)
        cache.setdefault("centre", (pts[..., :1, :], I1, I2, B1, B2, b12))
        return _pair(val, W)

    DI = paired_D(IPhi, action, point)
    _, I1, I2, B1, B2, b12 = cache["centre"]
    take = lambda a: a[..., 0, :, :]
    I1, I2, B1, B2, b12 = map(take, (I1, I2, B1, B2, b12))
    c1 = ch1(point)(0.0, nodes)
    c2 = ch2(point)(0.0, nodes)
    f1 = phi_vals(point)
    f2 = -f1
    f2[..., 0] += 1.0
    from .calculus import exterior_derivative

    dphi = exterior_derivative(phi1, point, zx)
    lm = alg.lam_mul
    rhs = lm(f1, lm(B1, c2)) + lm(c1, lm(f2, B2)) - lm(dphi, lm(B1, B2)) - b12
    res = -DI - _pair(rhs, W[:1])[..., 0, :]
    if return_parts:
        c1T = ch1(point)(T, nodes)
        c2T = ch2(point)(T, nodes)
        predicted = lm(f1, lm(c1T, B2)) + lm(f2, lm(B1, c2T))
        return form_norm(res), res, _pair(predicted, W[:1])[..., 0, :]
    return form_norm(res)


# ---------------------------------------------------------------------------
# Theta for linear symplectic actions


def check_proper(weights) -> np.ndarray:
    """Return X with <w_j, X> >= 1 for every weight, proving Phi^{-1}(0) = {0}.

    Raises ValueError when the weights do not lie in an open half-space.
    """
    W = np.atleast_2d(np.asarray(weights, dtype=float))
    if np.any(np.all(W == 0, axis=1)):
        raise ValueError("a zero weight makes the moment map non-proper")
    n, k = W.shape
    res = scipy.optimize.linprog(np.zeros(k), A_ub=-W, b_ub=-np.ones(n), bounds=[(None, None)] * k, method="highs")
    if res.status != 0:
        raise ValueError("weights do not lie in an open half-space: the moment map is not proper")
    return res.x


def theta_moment(weights, v: np.ndarray) -> np.ndarray:
    """Phi_K(v) = 1/2 sum_j w_j |v_j|^2 for v in C^n given as (..., n) complex."""
    W = np.atleast_2d(np.asarray(weights, dtype=float))
    return 0.5 * np.abs(v) ** 2 @ W


@dataclass(frozen=True)
class ThetaPairing:
    value: complex
    by_epsilon: tuple
    epsilons: tuple


def symplectic_theta_pairing(weights, Q: TestDensity, epsilons: Sequence[float] = (1e-2, 5e-3, 2.5e-3),
                             tol: float = 1e-13) -> ThetaPairing:
    """<Theta, Q> with Theta(X) = i^n int_V e^{i <Phi_K(v), X>} dv.

    In polar coordinates u_j = |v_j|^2 the volume is pi^n du, so
    <Theta, Q>_eps = (i pi)^n int_{u >= 0} e^{-eps sum u} Q^(-W^T u / 2) du;
    the three regularized values are Richardson-extrapolated to eps = 0.
    """
    check_proper(weights)
    W = np.atleast_2d(np.asarray(weights, dtype=float))
    n, k = W.shape
    if Q.dim != k:
        raise ValueError("test density dimension does not match the torus rank")
    eps = tuple(float(e) for e in epsilons)
    if len(eps) != 3 or not (eps[0] > eps[1] > eps[2] > 0) or not np.isclose(eps[0] / eps[1], eps[1] / eps[2]):
        raise ValueError("expected a geometric schedule of three decreasing epsilons")
    q = eps[0] / eps[1]
    # u-range: Q^ decays once |W^T u|/2 passes the cutoff frequency
    Tf = fourier_cutoff(Q, tol)
    wmin = np.min(np.linalg.norm(W, axis=1))
    umax = 2.0 * Tf / wmin
    order = int(64 + 1.5 * Q.radius * Tf)
    if n == 1:
        def g(u):
            return Q.fourier(-0.5 * np.outer(u, W[0]), order=order)

        vals = []
        for e in eps:
            re = scipy.integrate.quad(lambda u: (np.exp(-e * u) * g(np.array([u]))).real[0], 0, umax,
                                      epsabs=1e-13, epsrel=1e-12, limit=5000)[0]
            im = scipy.integrate.quad(lambda u: (np.exp(-e * u) * g(np.array([u]))).imag[0], 0, umax,
                                      epsabs=1e-13, epsrel=1e-12, limit=5000)[0]
            vals.append((1j * np.pi) * (re + 1j * im))
    else:
        u1, w1 = time_rule(umax, max_panel=max(umax / 64, 1.0), nodes=16).nodes()
        grids = np.stack(np.meshgrid(*([u1] * n), indexing="ij"), -1).reshape(-1, n)
        wts = np.prod(np.stack(np.meshgrid(*([w1] * n), indexing="ij"), -1).reshape(-1, n), axis=-1)
        qh = Q.fourier(-0.5 * grids @ W, order=order)
        vals = [(1j * np.pi) ** n * np.sum(wts * np.exp(-e * grids.sum(-1)) * qh) for e in eps]
    r1 = [(q * vals[i + 1] - vals[i]) / (q - 1) for i in range(2)]
    r2 = (q * q * r1[1] - r1[0]) / (q * q - 1)
    return ThetaPairing(complex(r2), tuple(complex(v) for v in vals), eps)


def theta_pairing_by_cutoff(weight: float, Q: TestDensity, T: float = 200.0, order=None,
                            radial_panels: int = 96) -> complex:
    """<Theta, Q> for V = C with weight ``weight`` through the engine:
    int_V f(|v|^2/T) <e^{i D omega}, Q>, with omega = 1/2 (x dy - y dx).

    f is 1 on [0, 1] and 0 from 2.  The volume integral uses rotation
    invariance: 2 pi int r g(r) dr with g the top coefficient at (r, 0).
    """
    from .calculus import ChartedAction, one_form_field

    act = rotation_action(weight)
    omega = one_form_field(act, lambda p: 0.5 * np.stack([-p[..., 1], p[..., 0]], -1),
                           lambda p: np.broadcast_to(np.array([[0.0, 0.5], [-0.5, 0.0]]), p.shape[:-1] + (2, 2)),
                           name="omega")
    spec = trivial_spec(omega)
    rmax = np.sqrt(2 * T)
    if order is None:
        x0 = np.array([[rmax, 0.0]])
        e = engine_chern(spec)(x0)
        order = select_order(Q, lambda x, w: _pair(e(1.0, x), _weights(Q, x, w, False)), cap=1024)
    nodes, w = Q.rule(order)
    Wq = _weights(Q, nodes, w, False)
    rs, ws = time_rule(rmax, max_panel=rmax / radial_panels, nodes=16).nodes()
    total = 0.0
    for chunk in np.array_split(np.arange(len(rs)), max(1, len(rs) // 64)):
        pts = np.stack([rs[chunk], np.zeros(len(chunk))], -1)
        chv = engine_chern(spec)(pts)(1.0, nodes)  # (P, M, 4)
        top = _pair(chv, Wq)[..., 0, 3]
        cutoff = _smooth_step(rs[chunk] ** 2 / T - 1.0)
        total = total + np.sum(ws[chunk] * 2 * np.pi * rs[chunk] * cutoff * top)
    return complex(total)


def rotation_action(weight: float = 1.0) -> "ChartedAction":
    """U(1) on R^2 = C with weight ``weight``: V_p X = X w (y, -x)."""
    from .calculus import ChartedAction

    def gens(p):
        return weight * np.stack([p[..., 1], -p[..., 0]], -1)[..., None, :]

    return ChartedAction(2, 1, gens, name=f"rotation(w={weight:g})")
