"""Brute-force reference implementations sharing no code with the table-driven algebra."""
import itertools

import numpy as np
import scipy.linalg


def perm_sign(seq):
    """Sign of the permutation sorting ``seq``; 0 on repeats."""
    seq = list(seq)
    if len(set(seq)) < len(seq):
        return 0
    inv = sum(1 for i, j in itertools.combinations(range(len(seq)), 2) if seq[i] > seq[j])
    return -1 if inv % 2 else 1


def subset_list(mask):
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def brute_product(a, b, dim_plus):
    """Graded product by explicit expansion over monomial pairs and block parities."""
    N, d, _ = a.shape
    out = np.zeros_like(a, dtype=complex)
    blocks = []
    for par in (0, 1):
        m = np.zeros((d, d))
        for i in range(d):
            for j in range(d):
                if ((i >= dim_plus) != (j >= dim_plus)) == bool(par):
                    m[i, j] = 1.0
        blocks.append(m)
    for I in range(N):
        for J in range(N):
            if I & J:
                continue
            s = perm_sign(subset_list(I) + subset_list(J))
            degJ = len(subset_list(J))
            for par in (0, 1):
                A = a[I] * blocks[par]
                sgn = (-1) ** (par * degJ)
                out[I | J] += s * sgn * (A @ b[J])
    return out


def _block_masks(d, dim_plus):
    masks = []
    for par in (0, 1):
        m = np.zeros((d, d))
        for i in range(d):
            for j in range(d):
                if ((i >= dim_plus) != (j >= dim_plus)) == bool(par):
                    m[i, j] = 1.0
        masks.append(m)
    return masks


def left_mult_matrix(a, dim_plus):
    """Matrix of b -> a.b on row-major flattened (monomial, row, col) arrays."""
    N, d, _ = a.shape
    L = np.zeros((N * d * d, N * d * d), dtype=complex)
    masks = _block_masks(d, dim_plus)
    for I in range(N):
        for J in range(N):
            if I & J:
                continue
            s = perm_sign(subset_list(I) + subset_list(J))
            degJ = len(subset_list(J))
            for par in (0, 1):
                A = a[I] * masks[par]
                coef = s * (-1) ** (par * degJ)
                K = I | J
                L[K * d * d:(K + 1) * d * d, J * d * d:(J + 1) * d * d] += coef * np.kron(A, np.eye(d))
    return L


def dense_exp(a, dim_plus):
    """exp(a) as exp(L_a) applied to the unit."""
    N, d, _ = a.shape
    unit = np.zeros((N, d, d), dtype=complex)
    unit[0] = np.eye(d)
    E = scipy.linalg.expm(left_mult_matrix(a, dim_plus))
    return (E @ unit.reshape(-1)).reshape(N, d, d)
