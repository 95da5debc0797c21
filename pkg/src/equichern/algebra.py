"""Pointwise arithmetic in Lambda(generators) tensored with End(E+ + E-).

Coefficients of an exterior element live in a dense array indexed by bitmask:
bit ``i`` of the index set means generator ``e_i`` is present, and the basis
monomial is ``e_{i1} ^ ... ^ e_{ik}`` with ``i1 < ... < ik``.

Matrix-valued forms are stored as arrays of shape ``(2**n, d, d)`` with
``d = dim_plus + dim_minus``.  The algebra is the graded (super) tensor
product, so for homogeneous pieces

    (w ⊗ A)(w' ⊗ B) = (-1)^{|A||w'|} (w ^ w') ⊗ AB.

All batched kernels accept arbitrary leading batch axes.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np
import scipy.linalg

MAX_GENERATORS = 8
HERMITIAN_TOL = 1e-10


# ---------------------------------------------------------------------------
# sign tables


def popcount(x: int) -> int:
    return bin(x).count("1")


def koszul_sign(a: int, b: int) -> int:
    """Sign of e_a ^ e_b relative to e_{a|b}; 0 if the monomials overlap."""
    if a & b:
        return 0
    swaps = 0
    for j in range(MAX_GENERATORS + 1):
        if b >> j & 1:
            swaps += popcount(a >> (j + 1))
    return -1 if swaps % 2 else 1


@dataclass(frozen=True)
class _Tables:
    n: int
    degree: np.ndarray  # popcount per monomial
    # for each left monomial I: (J indices, K = I|J, signs), split by parity of J
    even: tuple
    odd: tuple


@lru_cache(maxsize=None)
def tables(n: int) -> _Tables:
    if not 0 <= n <= MAX_GENERATORS:
        raise ValueError(f"generator count must be in [0, {MAX_GENERATORS}], got {n}")
    size = 1 << n
    degree = np.array([popcount(i) for i in range(size)])
    even, odd = [], []
    for i in range(size):
        js = [j for j in range(size) if not i & j]
        je = np.array([j for j in js if degree[j] % 2 == 0], dtype=int)
        jo = np.array([j for j in js if degree[j] % 2 == 1], dtype=int)
        even.append((je, i | je, np.array([koszul_sign(i, j) for j in je], dtype=float)))
        odd.append((jo, i | jo, np.array([koszul_sign(i, j) for j in jo], dtype=float)))
    return _Tables(n, degree, tuple(even), tuple(odd))


def n_from_size(size: int) -> int:
    n = size.bit_length() - 1
    if 1 << n != size:
        raise ValueError(f"coefficient length {size} is not a power of two")
    return n


# ---------------------------------------------------------------------------
# batched kernels


def lam_mul(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Exterior product of coefficient arrays ``u[..., 2**n]`` and ``v[..., 2**n]``."""
    u = np.asarray(u)
    v = np.asarray(v)
    n = n_from_size(u.shape[-1])
    if v.shape[-1] != u.shape[-1]:
        raise ValueError("generator count mismatch")
    tb = tables(n)
    shape = np.broadcast_shapes(u.shape, v.shape)
    out = np.zeros(shape, dtype=np.result_type(u, v, complex))
    N = 1 << n
    unz = np.flatnonzero(np.abs(u).reshape(-1, N).max(axis=0)) if u.size else ()
    vnz = np.abs(v).reshape(-1, N).max(axis=0) > 0 if v.size else np.zeros(N, bool)
    for i in unz:
        ui = u[..., i, None]
        for js, ks, sg in (tb.even[i], tb.odd[i]):
            keep = vnz[js]
            if keep.any():
                out[..., ks[keep]] += sg[keep] * ui * v[..., js[keep]]
    return out


def grading_twist(a: np.ndarray, dim_plus: int) -> np.ndarray:
    """Conjugation by the grading operator: negates the off-diagonal blocks."""
    t = np.array(a, dtype=complex, copy=True)
    t[..., :dim_plus, dim_plus:] *= -1
    t[..., dim_plus:, :dim_plus] *= -1
    return t


def gmf_mul(a: np.ndarray, b: np.ndarray, dim_plus: int) -> np.ndarray:
    """Graded product of arrays of shape ``(..., 2**n, d, d)``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    n = n_from_size(a.shape[-3])
    if b.shape[-3:] != a.shape[-3:]:
        raise ValueError(f"shape mismatch {a.shape[-3:]} vs {b.shape[-3:]}")
    tb = tables(n)
    at = grading_twist(a, dim_plus)
    shape = np.broadcast_shapes(a.shape, b.shape)
    out = np.zeros(shape, dtype=complex)
    for i in range(1 << n):
        ai = a[..., i, :, :]
        if not np.any(ai):
            continue
        for (js, ks, sg), left in ((tb.even[i], ai), (tb.odd[i], at[..., i, :, :])):
            if len(js):
                out[..., ks, :, :] += sg[:, None, None] * (left[..., None, :, :] @ b[..., js, :, :])
    return out


def supertrace_array(a: np.ndarray, dim_plus: int) -> np.ndarray:
    a = np.asarray(a)
    tr_plus = np.trace(a[..., :dim_plus, :dim_plus], axis1=-2, axis2=-1)
    tr_minus = np.trace(a[..., dim_plus:, dim_plus:], axis1=-2, axis2=-1)
    return tr_plus - tr_minus


def graded_norm_array(a: np.ndarray) -> np.ndarray:
    """Sum over monomials of the spectral norm of each coefficient matrix."""
    a = np.asarray(a)
    if a.shape[-1] == 0:
        return np.zeros(a.shape[:-3])
    return np.linalg.norm(a, ord=2, axis=(-2, -1)).sum(axis=-1)


# ---------------------------------------------------------------------------
# divided differences of exp


_TAYLOR_TERMS = 34
_TAYLOR_SPREAD = 2.0


def exp_divided_differences(x: np.ndarray) -> np.ndarray:
    """exp[x_0, ..., x_k] along the last axis, stable at coalescing nodes.

    Equals the simplex integral of exp(s_0 x_0 + ... + s_k x_k).  Clustered
    nodes use the series e^c sum_j h_j(x - c)/(k+j)! with h_j the complete
    homogeneous symmetric polynomials; spread-out nodes use the exponential of
    the bidiagonal (Opitz) matrix.
    """
    x = np.asarray(x, dtype=complex)
    m = x.shape[-1]
    flat = x.reshape(-1, m)
    out = np.empty(flat.shape[0], dtype=complex)
    if m == 1:
        return np.exp(x[..., 0])
    k = m - 1
    c = flat.mean(axis=1)
    y = flat - c[:, None]
    near = np.abs(y).max(axis=1) <= _TAYLOR_SPREAD
    if near.any():
        yy = y[near]
        J = _TAYLOR_TERMS
        H = yy[None, :, 0] ** np.arange(J)[:, None]
        for v in range(1, m):
            yv = yy[:, v]
            for j in range(1, J):
                H[j] = H[j] + yv * H[j - 1]
        inv_fact = np.array([1.0 / factorial(k + j) for j in range(J)])
        out[near] = np.exp(c[near]) * (inv_fact[:, None] * H).sum(axis=0)
    far = ~near
    if far.any():
        Z = np.zeros((int(far.sum()), m, m), dtype=complex)
        idx = np.arange(m)
        Z[:, idx, idx] = y[far]
        Z[:, idx[:-1], idx[1:]] = 1.0
        out[far] = np.exp(c[far]) * _batched_expm(Z)[:, 0, k]
    return out.reshape(x.shape[:-1])


def _batched_expm(Z: np.ndarray) -> np.ndarray:
    """Scaling and squaring with a degree-18 Taylor core, vectorized over the batch."""
    norms = np.abs(Z).sum(axis=-2).max(axis=-1)
    s = np.maximum(0, np.ceil(np.log2(np.maximum(norms, 1e-300) / 0.25))).astype(int)
    A = Z * (0.5 ** s)[:, None, None]
    m = Z.shape[-1]
    E = np.broadcast_to(np.eye(m, dtype=complex), Z.shape).copy()
    for j in range(18, 0, -1):
        E = np.eye(m) + (A @ E) / j
    for level in range(int(s.max(initial=0))):
        sq = s > level
        E[sq] = E[sq] @ E[sq]
    return E


@lru_cache(maxsize=None)
def _path_multisets(d: int, k: int):
    """Paths of length k+1 over d indices (C order) mapped to sorted multisets."""
    paths = np.indices((d,) * (k + 1)).reshape(k + 1, -1).T
    srt = np.sort(paths, axis=1)
    ms, inv = np.unique(srt, axis=0, return_inverse=True)
    return ms, inv.reshape(-1)


# ---------------------------------------------------------------------------
# exponential


_COND_LIMIT = 1e7
_GAUSS_ORDER = 12
_CHUNK_BUDGET = 2_000_000


def _eigen_bases(M: np.ndarray):
    """Eigenvalues, eigenbasis and inverse for a batch of square matrices.

    Normal matrices get a unitary basis through a Hermitian pencil, which
    stays well conditioned when eigenvalues coincide.
    """
    B, d, _ = M.shape
    mu = np.empty((B, d), dtype=complex)
    P = np.empty((B, d, d), dtype=complex)
    Pinv = np.empty((B, d, d), dtype=complex)
    Mh = np.conj(np.swapaxes(M, -1, -2))
    scale = np.maximum(np.abs(M).max(axis=(-2, -1)), 1.0)
    normal = np.abs(M @ Mh - Mh @ M).max(axis=(-2, -1)) <= 1e-13 * scale**2
    if normal.any():
        Mn = M[normal]
        H = 0.5 * (Mn + Mh[normal])
        K = -0.5j * (Mn - Mh[normal])
        _, U = np.linalg.eigh(H + 0.6180339887498949 * K)
        Uh = np.conj(np.swapaxes(U, -1, -2))
        T = Uh @ Mn @ U
        diag = np.diagonal(T, axis1=-2, axis2=-1)
        off = np.abs(T - diag[..., None] * np.eye(d)).max(axis=(-2, -1))
        good = off <= 1e-12 * scale[normal]
        sel = np.flatnonzero(normal)
        normal[sel[~good]] = False
        mu[sel[good]] = diag[good]
        P[sel[good]] = U[good]
        Pinv[sel[good]] = Uh[good]
    rest = ~normal
    ok = np.ones(B, dtype=bool)
    if rest.any():
        w, V = np.linalg.eig(M[rest])
        with np.errstate(all="ignore"):
            try:
                Vi = np.linalg.inv(V)
            except np.linalg.LinAlgError:
                Vi = np.stack([np.linalg.pinv(v) for v in V])
            cond = np.linalg.norm(V, axis=(-2, -1)) * np.linalg.norm(Vi, axis=(-2, -1))
        bad = ~np.isfinite(cond) | (cond > _COND_LIMIT)
        sel = np.flatnonzero(rest)
        mu[sel] = w
        P[sel] = V
        Pinv[sel] = Vi
        ok[sel[bad]] = False
    return mu, P, Pinv, ok


def _volterra_eigen(mu, P, Pinv, W, n):
    """Volterra series in an eigenbasis of the degree-0 part.

    ``W`` is the positive-degree part in the untwisted algebra, shape
    (B, 2**n, d, d) with W[:, 0] = 0.  Returns the untwisted exponential.
    """
    B, N, d, _ = W.shape
    Wt = Pinv[:, None] @ W @ P[:, None]
    Wl = np.ascontiguousarray(Wt.transpose(0, 2, 3, 1))  # (B, d, d, N)
    total = np.zeros((B, d, d, N), dtype=complex)
    idx = np.arange(d)
    total[:, idx, idx, 0] = np.exp(mu)
    chain = Wl[:, :, None, :, :]  # (B, d, mid, d, N)
    for k in range(1, n + 1):
        if not np.any(chain):
            break
        ms, inv = _path_multisets(d, k)
        E = exp_divided_differences(mu[:, ms])[:, inv].reshape(B, d, -1, d)
        total += np.einsum("bimjK,bimj->bijK", chain, E)
        if k == n:
            break
        ext = lam_mul(chain[:, :, :, :, None, :], Wl[:, None, None, :, :, :])
        chain = ext.reshape(B, d, -1, d, N)
    res = total.transpose(0, 3, 1, 2)
    return P[:, None] @ res @ Pinv[:, None]


def _volterra_quadrature(M, W, n):
    """Dyson recursion with Gauss-Legendre nodes, used for ill-conditioned bases."""
    x, w = np.polynomial.legendre.leggauss(_GAUSS_ORDER)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    N = W.shape[0]
    d = M.shape[0]

    def expM(s):
        e = np.zeros((N, d, d), dtype=complex)
        e[0] = scipy.linalg.expm(s * M)
        return e

    def dyson(s, level):
        base = expM(s)
        if level == 0 or s == 0.0:
            return base
        acc = base.copy()
        for xj, wj in zip(x, w):
            u = s * xj
            inner = lam_matrix_mul(W, dyson(u, level - 1))
            acc += s * wj * lam_matrix_mul(expM(s - u), inner)
        return acc

    return dyson(1.0, n)


def lam_matrix_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Untwisted product: Lambda signs only, matrices multiplied in order."""
    n = n_from_size(a.shape[-3])
    tb = tables(n)
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=complex)
    for i in range(1 << n):
        ai = a[..., i, :, :]
        if not np.any(ai):
            continue
        for js, ks, sg in (tb.even[i], tb.odd[i]):
            if len(js):
                out[..., ks, :, :] += sg[:, None, None] * (ai[..., None, :, :] @ b[..., js, :, :])
    return out


def _odd_row_flip(a: np.ndarray, dim_plus: int) -> np.ndarray:
    """Left multiplication by the grading operator on odd-degree coefficients.

    This map turns the graded product into the untwisted one and is an
    involution, so it is used both ways.
    """
    n = n_from_size(a.shape[-3])
    odd = tables(n).degree % 2 == 1
    out = np.array(a, dtype=complex, copy=True)
    out[..., odd, dim_plus:, :] *= -1
    return out


def _exp_scalar_forms(c: np.ndarray) -> np.ndarray:
    """exp of scalar forms (..., 2**n): e^{c_0} times the finite series of the nilpotent rest."""
    n = n_from_size(c.shape[-1])
    nil = c.copy()
    nil[..., 0] = 0.0
    present = np.flatnonzero(np.abs(nil).reshape(-1, c.shape[-1]).max(axis=0))
    mindeg = int(tables(n).degree[present].min()) if len(present) else n + 1
    total = np.zeros_like(c)
    total[..., 0] = 1.0
    term = total.copy()
    for k in range(1, n // mindeg + 1):
        term = lam_mul(term, nil) / k
        total = total + term
    return np.exp(c[..., :1]) * total


def exp_array(a: np.ndarray, dim_plus: int) -> np.ndarray:
    """Graded exponential of arrays of shape ``(..., 2**n, d, d)``."""
    a = np.asarray(a, dtype=complex)
    if a.shape[-1] != a.shape[-2]:
        raise ValueError("non-square matrix blocks")
    lead = a.shape[:-3]
    N, d = a.shape[-3], a.shape[-1]
    n = n_from_size(N)
    flat = a.reshape((-1, N, d, d))
    B = flat.shape[0]
    out = np.zeros_like(flat)
    if B == 0 or d == 0:
        return out.reshape(a.shape)
    if d == 1:
        return _exp_scalar_forms(flat[..., 0, 0]).reshape(a.shape)
    M = flat[:, 0]
    W = _odd_row_flip(flat, dim_plus)
    W[:, 0] = 0.0
    has_w = np.abs(W).reshape(B, -1).max(axis=1) > 0
    if (~has_w).any():
        out[~has_w, 0] = scipy.linalg.expm(M[~has_w])
    sel = np.flatnonzero(has_w)
    if len(sel):
        chunk = max(1, _CHUNK_BUDGET // (N * d ** (min(n, 6) + 2)))
        for start in range(0, len(sel), chunk):
            part = sel[start : start + chunk]
            mu, P, Pinv, ok = _eigen_bases(M[part])
            res = np.zeros((len(part), N, d, d), dtype=complex)
            if ok.any():
                res[ok] = _volterra_eigen(mu[ok], P[ok], Pinv[ok], W[part][ok], n)
            for j in np.flatnonzero(~ok):
                res[j] = _volterra_quadrature(M[part[j]], W[part[j]], n)
            if not np.all(np.isfinite(res)):
                raise np.linalg.LinAlgError("eigen-decomposition of the degree-0 part failed")
            out[part] = _odd_row_flip(res, dim_plus)
    return out.reshape(lead + (N, d, d))


# ---------------------------------------------------------------------------
# value types


@dataclass(frozen=True, eq=False)
class ExteriorElement:
    """Element of the exterior algebra on ``n_generators`` generators."""

    n_generators: int
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex)
        if c.shape != (1 << self.n_generators,):
            raise ValueError(f"expected {1 << self.n_generators} coefficients, got shape {c.shape}")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def zero(cls, n: int) -> "ExteriorElement":
        return cls(n, np.zeros(1 << n))

    @classmethod
    def scalar(cls, value: complex, n: int) -> "ExteriorElement":
        c = np.zeros(1 << n, dtype=complex)
        c[0] = value
        return cls(n, c)

    @classmethod
    def generator(cls, i: int, n: int) -> "ExteriorElement":
        if not 0 <= i < n:
            raise IndexError(f"generator {i} out of range for n={n}")
        c = np.zeros(1 << n, dtype=complex)
        c[1 << i] = 1.0
        return cls(n, c)

    @classmethod
    def from_terms(cls, n: int, terms: dict) -> "ExteriorElement":
        """Build from ``{(i1, i2, ...): coeff}`` with arbitrary index order."""
        c = np.zeros(1 << n, dtype=complex)
        for idx, val in terms.items():
            mask, sign = 0, 1
            for i in idx:
                s = koszul_sign(mask, 1 << i)
                if s == 0:
                    sign = 0
                    break
                sign *= s
                mask |= 1 << i
            if sign:
                c[mask] += sign * val
        return cls(n, c)

    def __getitem__(self, idx) -> complex:
        if isinstance(idx, int):
            return self.coefficients[idx]
        return self.coefficients[sum(1 << i for i in idx)]

    def degree_part(self, k: int) -> "ExteriorElement":
        deg = tables(self.n_generators).degree
        return ExteriorElement(self.n_generators, np.where(deg == k, self.coefficients, 0))

    def __add__(self, other):
        other = _as_exterior(other, self.n_generators)
        return ExteriorElement(self.n_generators, self.coefficients + other.coefficients)

    __radd__ = __add__

    def __neg__(self):
        return ExteriorElement(self.n_generators, -self.coefficients)

    def __sub__(self, other):
        return self + (-_as_exterior(other, self.n_generators))

    def __rsub__(self, other):
        return _as_exterior(other, self.n_generators) - self

    def __mul__(self, other):
        if np.isscalar(other):
            return ExteriorElement(self.n_generators, self.coefficients * other)
        return self.wedge(other)

    def __rmul__(self, other):
        if np.isscalar(other):
            return ExteriorElement(self.n_generators, self.coefficients * other)
        return NotImplemented

    def wedge(self, other: "ExteriorElement") -> "ExteriorElement":
        if other.n_generators != self.n_generators:
            raise ValueError("generator count mismatch")
        return ExteriorElement(self.n_generators, lam_mul(self.coefficients, other.coefficients))

    def norm(self) -> float:
        return float(np.abs(self.coefficients).sum())

    def allclose(self, other, atol=1e-12, rtol=0.0) -> bool:
        other = _as_exterior(other, self.n_generators)
        return bool(np.allclose(self.coefficients, other.coefficients, atol=atol, rtol=rtol))

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coefficients):
            if c != 0:
                name = "^".join(f"e{j}" for j in range(self.n_generators) if i >> j & 1) or "1"
                terms.append(f"({c:.6g})*{name}")
        return "ExteriorElement(" + (" + ".join(terms) or "0") + ")"


def _as_exterior(x, n) -> ExteriorElement:
    if isinstance(x, ExteriorElement):
        if x.n_generators != n:
            raise ValueError("generator count mismatch")
        return x
    if np.isscalar(x):
        return ExteriorElement.scalar(x, n)
    raise TypeError(f"cannot combine ExteriorElement with {type(x).__name__}")


@dataclass(frozen=True, eq=False)
class GradedMatrixForm:
    """Element of End(E+ + E-) ⊗ Lambda at a point."""

    n_generators: int
    dim_plus: int
    dim_minus: int
    coefficients: np.ndarray

    def __post_init__(self):
        d = self.dim_plus + self.dim_minus
        c = np.asarray(self.coefficients, dtype=complex)
        if c.shape != (1 << self.n_generators, d, d):
            raise ValueError(
                f"expected shape {(1 << self.n_generators, d, d)}, got {c.shape}"
            )
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coefficients", c)

    @property
    def dim(self) -> int:
        return self.dim_plus + self.dim_minus

    @classmethod
    def zeros(cls, n, dim_plus, dim_minus) -> "GradedMatrixForm":
        d = dim_plus + dim_minus
        return cls(n, dim_plus, dim_minus, np.zeros((1 << n, d, d)))

    @classmethod
    def identity(cls, n, dim_plus, dim_minus) -> "GradedMatrixForm":
        return cls.from_matrix(np.eye(dim_plus + dim_minus), n, dim_plus)

    @classmethod
    def from_matrix(cls, matrix, n, dim_plus) -> "GradedMatrixForm":
        m = np.asarray(matrix, dtype=complex)
        d = m.shape[0]
        c = np.zeros((1 << n, d, d), dtype=complex)
        c[0] = m
        return cls(n, dim_plus, d - dim_plus, c)

    @classmethod
    def from_exterior(cls, w: ExteriorElement, matrix, dim_plus) -> "GradedMatrixForm":
        """The product w ⊗ matrix."""
        m = np.asarray(matrix, dtype=complex)
        c = w.coefficients[:, None, None] * m[None]
        return cls(w.n_generators, dim_plus, m.shape[0] - dim_plus, c)

    def _check(self, other: "GradedMatrixForm"):
        if (other.n_generators, other.dim_plus, other.dim_minus) != (
            self.n_generators,
            self.dim_plus,
            self.dim_minus,
        ):
            raise ValueError("dimension or generator count mismatch")

    def _new(self, c) -> "GradedMatrixForm":
        return GradedMatrixForm(self.n_generators, self.dim_plus, self.dim_minus, c)

    def __add__(self, other):
        if np.isscalar(other):
            other = other * GradedMatrixForm.identity(self.n_generators, self.dim_plus, self.dim_minus)
        self._check(other)
        return self._new(self.coefficients + other.coefficients)

    __radd__ = __add__

    def __neg__(self):
        return self._new(-self.coefficients)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if np.isscalar(other):
            return self._new(self.coefficients * other)
        return wedge_product(self, other)

    def __rmul__(self, other):
        if np.isscalar(other):
            return self._new(self.coefficients * other)
        return NotImplemented

    def degree_zero(self) -> np.ndarray:
        return np.array(self.coefficients[0])

    def even_part(self) -> "GradedMatrixForm":
        """Component of even total parity (exterior degree plus block parity)."""
        return self._new(0.5 * (self.coefficients + _total_parity_flip(self)))

    def odd_part(self) -> "GradedMatrixForm":
        return self._new(0.5 * (self.coefficients - _total_parity_flip(self)))

    def parity(self) -> str:
        """'even', 'odd', 'zero' or 'inhomogeneous', recomputed from the entries."""
        e = np.abs(self.even_part().coefficients).max(initial=0.0)
        o = np.abs(self.odd_part().coefficients).max(initial=0.0)
        if e == 0 and o == 0:
            return "zero"
        if o == 0:
            return "even"
        if e == 0:
            return "odd"
        return "inhomogeneous"

    def entry(self, i: int, j: int) -> ExteriorElement:
        return ExteriorElement(self.n_generators, self.coefficients[:, i, j])

    def allclose(self, other, atol=1e-12, rtol=0.0) -> bool:
        return bool(np.allclose(self.coefficients, other.coefficients, atol=atol, rtol=rtol))


def _total_parity_flip(a: GradedMatrixForm) -> np.ndarray:
    """Apply (-1)^(total parity): exterior degree sign times block twist."""
    deg = tables(a.n_generators).degree
    sign = np.where(deg % 2 == 1, -1.0, 1.0)[:, None, None]
    return sign * grading_twist(a.coefficients, a.dim_plus)


@dataclass(frozen=True, eq=False)
class HermitianPart:
    """Hermitian degree-0 endomorphism with its smallest eigenvalue."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("HermitianPart needs a square matrix")
        if np.abs(m - m.conj().T).max(initial=0.0) > HERMITIAN_TOL:
            raise ValueError("matrix is not Hermitian to tolerance 1e-10")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def m_R(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix).min())


# ---------------------------------------------------------------------------
# operations


def wedge_product(a: GradedMatrixForm, b: GradedMatrixForm) -> GradedMatrixForm:
    a._check(b)
    return a._new(gmf_mul(a.coefficients, b.coefficients, a.dim_plus))


def supercommutator(a: GradedMatrixForm, b: GradedMatrixForm) -> GradedMatrixForm:
    """[a, b] = ab - (-1)^{|a||b|} ba, extended bilinearly over parity parts."""
    ae, ao = a.even_part(), a.odd_part()
    be, bo = b.even_part(), b.odd_part()
    out = wedge_product(a, b) - wedge_product(be, a) - wedge_product(bo, ae)
    return out + wedge_product(bo, ao)


def supertrace(a: GradedMatrixForm) -> ExteriorElement:
    return ExteriorElement(a.n_generators, supertrace_array(a.coefficients, a.dim_plus))


def super_exponential(a: GradedMatrixForm) -> GradedMatrixForm:
    return a._new(exp_array(a.coefficients, a.dim_plus))


def graded_norm(a) -> float:
    if isinstance(a, ExteriorElement):
        return a.norm()
    return float(graded_norm_array(a.coefficients))


def smallest_eigenvalue(R) -> float:
    if not isinstance(R, HermitianPart):
        R = HermitianPart(np.asarray(R))
    return R.m_R


def exponential_norm_bound(R: HermitianPart, S: GradedMatrixForm, T: GradedMatrixForm) -> float:
    """Right side e^{-m(R)} e^{||S||} P(||T||) of the exponential norm bound."""
    q = T.n_generators
    t = graded_norm(T)
    poly = sum(t**k / factorial(k) for k in range(q + 1))
    return float(np.exp(-R.m_R + graded_norm(S)) * poly)
