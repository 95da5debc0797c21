"""Registry of verification checks driven by the command line.

Each check returns a residual and is compared against its tolerance; the
comparison is ``residual <= tolerance`` except for decay exponents, which
pass when ``residual <= -tolerance`` (the tolerance is the required order).
"""
from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import algebra as alg
from . import chern as ch
from . import generalized as gen
from . import reference
from .calculus import kirwan_one_form
from .decay import fit_decay_exponent, window_flags
from .examples import ExampleCase, atiyah_inequality_grid, gaussian_profile, get_case, mean_decay_profile


@dataclass(frozen=True)
class RunConfig:
    """Everything a run depends on; ``None`` means the per-check default."""

    example: str = "all"
    check: str = "all"
    T: Optional[float] = None
    S: Optional[float] = None
    grid: int = 10
    tol: Optional[float] = None
    seed: int = 0
    out: Optional[str] = None
    jobs: int = 1
    order_cap: int = gen.MAX_ORDER
    timings: bool = False

    def validate(self) -> "RunConfig":
        if self.tol is not None and not self.tol > 0:
            raise ValueError("tolerance must be strictly positive")
        for name in ("T", "S"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ValueError(f"{name} must be positive")
        if self.grid < 2:
            raise ValueError("grid density must be at least 2")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        if self.order_cap < gen.DEFAULT_ORDER:
            raise ValueError(f"order cap must be at least {gen.DEFAULT_ORDER}")
        return self


@dataclass(frozen=True)
class Outcome:
    residual: float
    details: tuple = ()  # (key, value) pairs
    tables: dict = field(default_factory=dict)  # file stem -> (header, rows)
    extra_pass: bool = True  # conditions beyond the residual, such as monotonicity


@dataclass(frozen=True)
class Check:
    name: str
    example: str
    anchor: str
    tolerance: float
    run: Callable[[RunConfig], Outcome]
    criterion: str = "le"  # "le": residual <= tol; "order": residual <= -tol


@dataclass(frozen=True)
class CheckResult:
    name: str
    anchor: str
    residual: float
    tolerance: float
    criterion: str
    passed: bool
    wall_time: float
    details: tuple
    tables: dict


def execute(check: Check, config: RunConfig) -> CheckResult:
    tol = config.tol if config.tol is not None else check.tolerance
    t0 = time.perf_counter()
    out = check.run(config)
    wall = time.perf_counter() - t0
    r = float(out.residual)
    ok = (r <= tol) if check.criterion == "le" else (r <= -tol)
    ok = bool(ok and out.extra_pass and np.isfinite(r))
    crit = "residual <= tolerance" if check.criterion == "le" else "residual <= -tolerance"
    return CheckResult(check.name, check.anchor, r, tol, crit, ok, wall, out.details, out.tables)


# ---------------------------------------------------------------------------
# graded algebra


def _random_gmf(rng, n, p, q, scale=1.0, batch: int | None = None):
    shape = (() if batch is None else (batch,)) + (1 << n, p + q, p + q)
    return scale * (rng.normal(size=shape) + 1j * rng.normal(size=shape))


def _gnorm(a):
    return float(alg.graded_norm_array(a))


def _parity_parts(a, n, p):
    deg = alg.tables(n).degree
    flip = np.where(deg % 2 == 1, -1.0, 1.0)[:, None, None] * alg.grading_twist(a, p)
    return 0.5 * (a + flip), 0.5 * (a - flip)


def graded_identities(config: RunConfig, count: int = 1000) -> Outcome:
    """Unit, associativity, Koszul signs, Str cyclicity, submultiplicativity on random elements.

    Instances are drawn one shape at a time and checked in batches of equal shape.
    """
    rng = np.random.default_rng(config.seed)
    worst = dict(unit=0.0, associativity=0.0, koszul=0.0, str_cyclicity=0.0, submultiplicativity=0.0)
    shapes = []
    for _ in range(count):
        n = int(rng.integers(1, 5))
        p = int(rng.integers(0, 3))
        shapes.append((n, p, int(rng.integers(0 if p else 1, 4 - p))))
    for (n, p, q), m in sorted(Counter(shapes).items()):
        a, b, c = (_random_gmf(rng, n, p, q, batch=m) for _ in range(3))
        one = np.zeros_like(a)
        one[:, 0] = np.eye(p + q)
        na, nb, nc = (alg.graded_norm_array(x) for x in (a, b, c))
        mul = lambda x, y: alg.gmf_mul(x, y, p)
        gn = alg.graded_norm_array
        worst["unit"] = max(worst["unit"], float(np.max(gn(mul(a, one) - a) / na)),
                            float(np.max(gn(mul(one, a) - a) / na)))
        ab = mul(a, b)
        assoc = gn(mul(ab, c) - mul(a, mul(b, c))) / (na * nb * nc)
        worst["associativity"] = max(worst["associativity"], float(assoc.max()))
        worst["submultiplicativity"] = max(worst["submultiplicativity"], float(np.max((gn(ab) - na * nb) / (na * nb))))
        # supertrace: Str(xy) = (-1)^{|x||y|} Str(yx) on homogeneous parts
        parts_a, parts_b = _parity_parts(a, n, p), _parity_parts(b, n, p)
        for px, x in enumerate(parts_a):
            for py, y in enumerate(parts_b):
                lhs = alg.supertrace_array(mul(x, y), p)
                rhs = (-1) ** (px * py) * alg.supertrace_array(mul(y, x), p)
                scale = np.maximum(gn(x) * gn(y), 1e-300)
                worst["str_cyclicity"] = max(worst["str_cyclicity"], float(np.max(np.abs(lhs - rhs).sum(-1) / scale)))
        # Koszul signs: basis monomials against the sorting permutation, and
        # graded commutativity of homogeneous exterior elements
        deg = alg.tables(n).degree
        for _ in range(m):
            I, J = (int(rng.integers(0, 1 << n)) for _ in range(2))
            u = np.zeros(1 << n)
            v = np.zeros(1 << n)
            u[I] = v[J] = 1.0
            prod = alg.lam_mul(u, v)
            if I & J:
                err = float(np.abs(prod).max())
            else:
                want = reference.perm_sign(reference.subset_list(I) + reference.subset_list(J))
                err = abs(prod[I | J] - want)
            x = rng.normal(size=1 << n) * (deg == deg[I])
            y = rng.normal(size=1 << n) * (deg == deg[J])
            sign = (-1) ** (int(deg[I]) * int(deg[J]))
            scale = max(float(np.abs(x).sum() * np.abs(y).sum()), 1e-300)
            err = max(err, float(np.abs(alg.lam_mul(x, y) - sign * alg.lam_mul(y, x)).sum()) / scale)
            worst["koszul"] = max(worst["koszul"], err)
    residual = max(worst.values())
    return Outcome(residual, tuple((k, v) for k, v in worst.items()) + (("instances", count),))


def volterra_exponential(config: RunConfig, count: int = 200) -> Outcome:
    """Relative error of the Volterra exponential against the dense left-multiplication exponential."""
    rng = np.random.default_rng(config.seed + 1)
    worst = 0.0
    for _ in range(count):
        n = int(rng.integers(1, 5))
        d = int(rng.integers(1, 4))
        p = int(rng.integers(0, d + 1))
        a = _random_gmf(rng, n, p, d - p, 0.5)
        # a negative Hermitian-dominated degree-0 part, as in curvatures
        h = a[0] @ a[0].conj().T
        a[0] = a[0] - h
        got = alg.exp_array(a, p)
        ref = reference.dense_exp(a, p)
        worst = max(worst, _gnorm(got - ref) / _gnorm(ref))
    return Outcome(worst, (("instances", count),))


def exponential_bound_check(config: RunConfig, count: int = 1000) -> Outcome:
    """max over random (R, S, T) of ||e^{-R+S+T}|| / (e^{-m(R)} e^{||S||} P(||T||)) - 1."""
    rng = np.random.default_rng(config.seed + 2)
    worst = -np.inf
    for _ in range(count):
        n = int(rng.integers(1, 5))
        d = int(rng.integers(1, 4))
        p = int(rng.integers(0, d + 1))
        G = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        R = alg.HermitianPart(0.5 * (G + G.conj().T) * rng.uniform(0.1, 3.0))
        S = alg.GradedMatrixForm(n, p, d - p, _random_gmf(rng, n, p, d - p, rng.uniform(0.05, 1.0)))
        Tc = _random_gmf(rng, n, p, d - p, rng.uniform(0.05, 1.0))
        Tc[0] = 0.0
        T = alg.GradedMatrixForm(n, p, d - p, Tc)
        total = -R.matrix[None] * (np.arange(1 << n) == 0)[:, None, None] + S.coefficients + T.coefficients
        lhs = _gnorm(alg.exp_array(total, p))
        worst = max(worst, lhs / alg.exponential_norm_bound(R, S, T) - 1.0)
    return Outcome(worst, (("instances", count),))


# ---------------------------------------------------------------------------
# closed forms


def _plane_grid(k: int, lo=-2.0, hi=2.0, exclude_origin=True):
    g = np.linspace(lo, hi, k)
    pts = np.stack(np.meshgrid(g, g, indexing="ij"), -1).reshape(-1, 2)
    if exclude_origin:
        pts = pts[np.sum(pts**2, axis=-1) > 1e-12]
    return pts


def D_lambda_closed_form(case_name: str) -> Callable[[RunConfig], Outcome]:
    def run(config: RunConfig) -> Outcome:
        case = get_case(case_name)
        pts = _plane_grid(config.grid)
        Xs = np.linspace(-2.0, 2.0, config.grid)[:, None]
        worst = 0.0
        for X in Xs:
            worst = max(worst, float(np.abs(case.one_form.D(pts, X) - case.oracles["D_lambda"](pts, X)).max()))
        return Outcome(worst, (("points", len(pts)), ("X_values", len(Xs))))

    return run


def atiyah_D_lambda(config: RunConfig) -> Outcome:
    case = get_case("atiyah")
    pts = atiyah_inequality_grid(max(2, config.grid // 2)) / 5.0
    worst = 0.0
    for X in np.linspace(-2.0, 2.0, 5)[:, None]:
        eng = case.one_form.D(pts, X)
        worst = max(worst, float(np.abs(eng - case.oracles["D_lambda"](pts, X)).max()),
                    float(np.abs(eng - case.oracles["D_lambda_z"](pts, X)).max()))
    return Outcome(worst, (("points", len(pts)),))


def atiyah_exp_curvature(config: RunConfig) -> Outcome:
    """Engine e^{F_t(i theta)} against the g(z) closed form on the 27-configuration grid."""
    case = get_case("atiyah")
    spec = case.specs["sigma"]
    worst = 0.0
    n = 0
    for t in case.sample_t:
        for X in case.sample_X:
            for p in case.sample_points:
                E = alg.exp_array(ch.curvature_array(spec, t, X, p), spec.dim_plus)
                worst = max(worst, float(np.abs(E - case.oracles["exp_curvature"](t, X[0], p)).max()))
                n += 1
    return Outcome(worst, (("configurations", n),))


def atiyah_chern_closed_form(config: RunConfig) -> Outcome:
    """Engine Ch and eta of the full Atiyah superconnection against their closed forms."""
    case = get_case("atiyah")
    worst = 0.0
    for t in case.sample_t:
        for X in case.sample_X:
            for p in case.sample_points:
                c, e = ch.chern_and_transgression(case.spec, t, X, p)
                worst = max(worst, float(np.abs(c - case.oracles["chern"](t, X[0], p)).max()),
                            float(np.abs(e - case.oracles["transgression"](t, X[0], p)).max()))
    return Outcome(worst)


# ---------------------------------------------------------------------------
# transgression identity and closedness


def transgression_identity(case_name: str, dt: float = 1e-4, h: float = 1e-5) -> Callable[[RunConfig], Outcome]:
    """Max residual over the case grid; the worst configuration is re-evaluated at dt/2.

    A ratio near 4 means the residual is the O(dt^2) truncation of the central difference.
    """

    def run(config: RunConfig) -> Outcome:
        case = get_case(case_name)
        worst, arg = -1.0, None
        n = 0
        for spec in case.specs.values():
            for p in case.sample_points:
                for X in case.sample_X:
                    for t in case.sample_t:
                        r = ch.transgression_identity_residual(spec, t, X, p, dt=dt, h=h)
                        if r > worst:
                            worst, arg = r, (spec, t, X, p)
                        n += 1
        spec, t, X, p = arg
        half = ch.transgression_identity_residual(spec, t, X, p, dt=dt / 2, h=h)
        return Outcome(worst, (("dt", dt), ("h", h), ("evaluations", n), ("worst_spec", spec.name),
                               ("worst_t", t), ("worst_X", _fmt_point(X)), ("worst_point", _fmt_point(p)),
                               ("residual_at_half_dt", half), ("halving_ratio", worst / max(half, 1e-300))))

    return run


def closedness(case_name: str) -> Callable[[RunConfig], Outcome]:
    def run(config: RunConfig) -> Outcome:
        case = get_case(case_name)
        worst = 0.0
        for spec in case.specs.values():
            for p in case.sample_points:
                for X in case.sample_X:
                    for t in case.sample_t:
                        worst = max(worst, ch.closedness_residual(spec, t, X, p))
        return Outcome(worst)

    return run


# ---------------------------------------------------------------------------
# pairings


def localization(case_name: str) -> Callable[[RunConfig], Outcome]:
    def run(config: RunConfig) -> Outcome:
        case = get_case(case_name)
        T = config.T if config.T is not None else 40.0
        Ts = (T / 4, T / 2, T)
        Q = case.extra["density"]
        p = case.extra["localization_point"]
        seq = [gen.localization_residual(case.one_form, Q, t, p) for t in Ts]
        monotone = all(b < a for a, b in zip(seq, seq[1:]))
        details = tuple((f"residual_T={t:g}", r) for t, r in zip(Ts, seq)) + (("monotone", monotone),)
        return Outcome(seq[-1], details, extra_pass=monotone)

    return run


def beta_boundary(case_name: str) -> Callable[[RunConfig], Outcome]:
    """Paired beta_T at large T against the boundary-value closed form."""

    def run(config: RunConfig) -> Outcome:
        case = get_case(case_name)
        T = config.T if config.T is not None else 200.0
        Q = case.extra["density"]
        worst = 0.0
        fam = gen.engine_transgression(case.spec)
        for p in case.sample_points[:2]:
            pv = gen.pair_family_with_density(fam, Q, T, p)
            worst = max(worst, float(np.abs(pv.value - case.oracles["beta_pairing"](Q, p)).sum()))
        return Outcome(worst, (("T", T),))

    return run


def multiplicativity(config: RunConfig) -> Outcome:
    case = get_case("multiplicativity")
    T = config.T if config.T is not None else 40.0
    Q = case.extra["density"]
    s = case.specs
    res = [gen.multiplicativity_residual(s["sigma1"], s["sigma2"], case.extra["phi1"], Q, T, p)
           for p in case.sample_points]
    details = tuple((f"residual_at_{_fmt_point(p)}", r) for p, r in zip(case.sample_points, res))
    return Outcome(max(res), (("T", T),) + details)


def torus_sum_identity(region: int) -> Callable[[RunConfig], Outcome]:
    def run(config: RunConfig) -> Outcome:
        case = get_case("torus")
        S = config.S if config.S is not None else 50.0
        p = case.extra[f"U{region}_point"]
        r = gen.one_form_sum_identity_residual(case.one_form, case.extra["mu"], case.extra["split"],
                                               case.extra["density"], S, p, region=region)
        return Outcome(r, (("S", S), ("point", _fmt_point(p))))

    return run


def theta_dual_route(config: RunConfig) -> Outcome:
    case = get_case("exact_symplectic")
    w = case.extra["weight"]
    worst = 0.0
    details = []
    for Q in case.extra["densities"]:
        r1 = gen.symplectic_theta_pairing([[w]], Q).value
        r2 = gen.theta_pairing_by_cutoff(w, Q)
        closed = case.oracles["theta_pairing"](Q)
        worst = max(worst, abs(r1 - r2))
        details += [(f"{Q.name}.routes", abs(r1 - r2)), (f"{Q.name}.cutoff_vs_closed_form", abs(r2 - closed))]
    return Outcome(worst, tuple(details))


def kirwan_zero_set(config: RunConfig) -> Outcome:
    """Phi_K(1, 0) = 1/2, |lambda_k|^2 = w^4 r^6/4, and lambda_k, omega vanish together."""
    case = get_case("exact_symplectic")
    w = case.extra["weight"]
    g = np.linspace(-1.0, 1.0, 50)
    pts = np.stack(np.meshgrid(g, g, indexing="ij"), -1).reshape(-1, 2)
    pts = np.concatenate([pts, np.zeros((1, 2))])
    moment = lambda p: 0.5 * w * np.sum(p**2, axis=-1)[..., None]
    lk = kirwan_one_form(case.action, moment, pts)
    norm2 = np.sum(lk**2, axis=-1)
    rel = np.abs(norm2 - case.oracles["kirwan_norm2"](pts)) / np.maximum(case.oracles["kirwan_norm2"](pts), 1e-300)
    rel[norm2 == 0] = 0.0
    om = case.one_form.components(pts)
    zero_k = np.all(lk == 0, axis=-1)
    zero_w = np.all(om == 0, axis=-1)
    mismatch = int(np.sum(zero_k != zero_w))
    phi = abs(float(case.oracles["moment"](np.array([1.0, 0.0]))[0]) - 0.5)
    return Outcome(max(float(rel.max()), phi, float(mismatch)),
                   (("zero_set_mismatches", mismatch), ("moment_at_(1,0)_error", phi)))


# ---------------------------------------------------------------------------
# Atiyah estimates


def atiyah_inequality(config: RunConfig) -> Outcome:
    """Worst of -margin/(1 + |xi|^2) on the grid; roundoff allowance is the tolerance."""
    case = get_case("atiyah")
    pts = atiyah_inequality_grid(config.grid)
    R = np.sum(pts**2, axis=-1)
    margin = case.oracles["inequality_margin"](pts)
    engine = ch.h_sigma(case.symbol, pts) + np.sum(np.abs(case.one_form.moment(pts)) ** 2, axis=-1) - 0.5 * R
    scaled = -np.minimum(margin, engine) / (1.0 + R)
    violations = int(np.sum(scaled > 1e-12))
    return Outcome(float(scaled.max()), (("points", len(pts)), ("violations", violations),
                                         ("min_margin", float(margin.min()))))


def decay_table_rows(table, window) -> list:
    flags = window_flags(table.radius, window) & ~table.flagged
    return [(float(r), float(v), int(f)) for r, v, f in zip(table.radius, table.norm, flags)]


def atiyah_decay(config: RunConfig) -> Outcome:
    case = get_case("atiyah")
    table = mean_decay_profile(case)
    keep = ~table.flagged
    fit = fit_decay_exponent((table.radius[keep], table.norm[keep]))
    rows = decay_table_rows(table, fit.window)
    return Outcome(fit.exponent, (("window_lo", fit.window[0]), ("window_hi", fit.window[1]),
                                  ("points", fit.n_points), ("stderr", fit.stderr)),
                   {"atiyah_decay": (("t_or_radius", "norm", "fitted_window_flag"), rows)})


def atiyah_gaussian(config: RunConfig) -> Outcome:
    case = get_case("atiyah")
    s2, norm = gaussian_profile(case)
    slope = float(np.polyfit(s2, np.log(norm), 1)[0])
    rows = [(float(a), float(b), 1) for a, b in zip(s2, norm)]
    return Outcome(abs(slope + 1.0), (("slope", slope),),
                   {"atiyah_gaussian": (("t_or_radius", "norm", "fitted_window_flag"), rows)})


def _fmt_point(p) -> str:
    return "(" + ",".join(f"{x:g}" for x in np.asarray(p)) + ")"


# ---------------------------------------------------------------------------
# registry


CHECKS: dict[str, Check] = {}


def _register(*checks: Check):
    for c in checks:
        CHECKS[c.name] = c


_register(
    Check("algebra.graded_identities", "algebra", "‖ab‖ ≤ ‖a‖‖b‖", 1e-12, graded_identities),
    Check("algebra.volterra_exponential", "algebra", "e^{A+B} = Σ ∫_Δ e^{s₀A}B⋯Be^{s_kA}", 1e-9, volterra_exponential),
    Check("algebra.exponential_bound", "algebra", "‖e^{−R+S+T}‖ ≤ e^{−m(R)}e^{‖S‖}P(‖T‖)", 1e-12, exponential_bound_check),
    Check("plane_rotation.D_lambda", "plane_rotation", "Dλ = 2dx∧dy + X(x²+y²)", 1e-13,
          D_lambda_closed_form("plane_rotation")),
    Check("plane_rotation.transgression", "plane_rotation", "∂ₜCh = −D(η)", 1e-6, transgression_identity("plane_rotation")),
    Check("plane_rotation.closedness", "plane_rotation", "D(Ch) = 0", 1e-7, closedness("plane_rotation")),
    Check("plane_rotation.localization", "plane_rotation", "1 = D(β(λ)) off C_λ", 1e-4, localization("plane_rotation")),
    Check("plane_rotation.beta_boundary", "plane_rotation", "β(λ) = 1/(X+i0) (xdy−ydx)/(x²+y²)", 1e-4,
          beta_boundary("plane_rotation")),
    Check("cotangent_circle.D_lambda", "cotangent_circle", "Dλ = dθdξ − Xξ", 1e-13,
          D_lambda_closed_form("cotangent_circle")),
    Check("cotangent_circle.transgression", "cotangent_circle", "∂ₜCh = −D(η)", 1e-6,
          transgression_identity("cotangent_circle")),
    Check("cotangent_circle.localization", "cotangent_circle", "1 = D(β(λ)) off C_λ", 1e-4,
          localization("cotangent_circle")),
    Check("cotangent_circle.beta_boundary", "cotangent_circle", "β(λ) = 1/(X∓i0) dθ for ±ξ > 0", 1e-4,
          beta_boundary("cotangent_circle")),
    Check("atiyah.D_lambda", "atiyah", "Dλ = dλ − i θ f_λ", 1e-13, atiyah_D_lambda),
    Check("atiyah.exp_curvature", "atiyah", "g(z) = (e^z−1)/z", 1e-10, atiyah_exp_curvature),
    Check("atiyah.chern_closed_form", "atiyah", "Ch = e^{itDλ} Str e^{F_t}", 1e-10, atiyah_chern_closed_form),
    Check("atiyah.transgression", "atiyah", "∂ₜCh = −D(η)", 1e-6, transgression_identity("atiyah")),
    Check("atiyah.closedness", "atiyah", "D(Ch) = 0", 1e-7, closedness("atiyah")),
    Check("atiyah.inequality", "atiyah", "h_σ + ‖f_λ‖² ≥ ½‖ξ‖²", 1e-12, atiyah_inequality),
    Check("atiyah.decay_exponent", "atiyah", "‖⟨Ch, Q⟩‖ ≤ c_q (1+‖ξ‖²)^{−q}", 6.0, atiyah_decay, "order"),
    Check("atiyah.gaussian_slope", "atiyah", "⟨Ch, Q⟩ ∝ e^{−|z₁|²}", 0.05, atiyah_gaussian),
    Check("exact_symplectic.transgression", "exact_symplectic", "∂ₜCh = −D(η)", 1e-6,
          transgression_identity("exact_symplectic")),
    Check("exact_symplectic.kirwan", "exact_symplectic", "Cr(‖Φ‖²) = Φ⁻¹(0)", 1e-12, kirwan_zero_set),
    Check("exact_symplectic.theta", "exact_symplectic", "Θ(X) = iⁿ∫_V e^{i⟨Φ(v),X⟩}dv", 1e-4, theta_dual_route),
    Check("torus.transgression", "torus", "∂ₜCh = −D(η)", 1e-6, transgression_identity("torus")),
    Check("torus.sum_identity_U1", "torus", "D(I₁) = β(λ+μ) − β₁(λ) on U₁", 1e-3, torus_sum_identity(1)),
    Check("torus.sum_identity_U2", "torus", "D(I₂) = −β(λ+μ) + β₂(μ) on U₂", 1e-3, torus_sum_identity(2)),
    Check("multiplicativity.transgression", "multiplicativity", "∂ₜCh = −D(η)", 1e-6,
          transgression_identity("multiplicativity")),
    Check("multiplicativity.fundamental", "multiplicativity", "c(σ₁)·c(σ₂) = c(σ₁⊙σ₂)", 1e-3, multiplicativity),
)

EXAMPLES = ("algebra",) + tuple(sorted({c.example for c in CHECKS.values()} - {"algebra"}))


def _split(selector: str) -> list[str]:
    return [s.strip() for s in selector.split(",") if s.strip()]


def select(example: str = "all", check: str = "all") -> list[Check]:
    """Checks matching both selectors, sorted by name.

    Selectors are comma-separated; "all" matches everything and an empty
    selector matches nothing.  A check selector matches a full name or the
    part after the example prefix.
    """
    ex = _split(example)
    ck = _split(check)
    for e in ex:
        if e != "all" and e not in EXAMPLES:
            raise KeyError(f"unknown example {e!r}")
    short = {c.name.split(".", 1)[1] for c in CHECKS.values()}
    for c in ck:
        if c != "all" and c not in CHECKS and c not in short:
            raise KeyError(f"unknown check {c!r}")
    out = []
    for c in CHECKS.values():
        if "all" not in ex and c.example not in ex:
            continue
        if "all" not in ck and c.name not in ck and c.name.split(".", 1)[1] not in ck:
            continue
        out.append(c)
    return sorted(out, key=lambda c: c.name)
