"""Numeric inner loops, compiled with numba when available.

Every kernel exists twice: an ``@njit`` loop version and a vectorised numpy
version with identical semantics.  The numba path is used unless numba is
missing or the environment variable ``G2SOLITON_DISABLE_NUMBA`` is set to a
non-empty value other than ``0``.  Both implementations stay importable
(``NUMBA_KERNELS`` / ``NUMPY_KERNELS``) so tests and the benchmark can compare
them in one process.
"""

import os

import numpy as np

try:
    import numba
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

_flag = os.environ.get("G2SOLITON_DISABLE_NUMBA", "").strip()
USE_NUMBA = HAS_NUMBA and _flag in ("", "0")
BACKEND = "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# numpy reference implementations


def _scatter_product_np(a, b, ia, ib, ik, sgn, out_len):
    return np.bincount(ik, weights=sgn * a[ia] * b[ib], minlength=out_len)


def _operator_np(coef, ia, ib, ik, sgn, rows, cols):
    # matrix of x -> sum_t sgn[t] * coef[ib[t]] * x[ia[t]] e_{ik[t]}
    out = np.zeros((rows, cols))
    np.add.at(out, (ik, ia), sgn * coef[ib])
    return out


def _compound_np(m, combos):
    # combos: (N, p) int array of index tuples; returns N x N minors
    p = combos.shape[1]
    if p == 0:
        return np.ones((1, 1))
    sub = m[combos[:, None, :, None], combos[None, :, None, :]]
    return np.linalg.det(sub.reshape(-1, p, p)).reshape(len(combos), len(combos))


def _koszul_ricci_np(c):
    # c[k, i, j]: structure constants in an orthonormal frame
    cx = np.einsum("kij->ijk", c)  # C_{ijk} = g([u_i, u_j], u_k)
    gamma = 0.5 * (cx - np.einsum("bca->abc", cx) + np.einsum("cab->abc", cx))
    # nabla_{u_a} u_d = sum_e gamma[a, d, e] u_e ; N[a][e, d] = gamma[a, d, e]
    nab = np.einsum("ade->aed", gamma)
    comm = np.einsum("aij,bjk->abik", nab, nab) - np.einsum("bij,ajk->abik", nab, nab)
    brk = np.einsum("cab,cik->abik", c, nab)
    r = comm - brk  # r[a, b] is the matrix of R(u_a, u_b)
    return np.einsum("abac->bc", r)


def _gl_operator_np(dmat, src, pos, tgt, col, sgn, rows):
    out = np.zeros((rows, rows))
    mask = tgt >= 0
    np.add.at(out, (tgt[mask], src[mask]), sgn[mask] * dmat[pos[mask], col[mask]])
    return out


NUMPY_KERNELS = {
    "scatter_product": _scatter_product_np,
    "operator": _operator_np,
    "compound": _compound_np,
    "koszul_ricci": _koszul_ricci_np,
    "gl_operator": _gl_operator_np,
}


# ---------------------------------------------------------------------------
# numba implementations

if HAS_NUMBA:

    @njit(cache=True)
    def _scatter_product_nb(a, b, ia, ib, ik, sgn, out_len):
        out = np.zeros(out_len)
        for t in range(ia.shape[0]):
            out[ik[t]] += sgn[t] * a[ia[t]] * b[ib[t]]
        return out

    @njit(cache=True)
    def _operator_nb(coef, ia, ib, ik, sgn, rows, cols):
        out = np.zeros((rows, cols))
        for t in range(ia.shape[0]):
            out[ik[t], ia[t]] += sgn[t] * coef[ib[t]]
        return out

    @njit(cache=True)
    def _small_det(a):
        # LU with partial pivoting on a copy; p <= 9
        n = a.shape[0]
        w = a.copy()
        det = 1.0
        for k in range(n):
            piv = k
            big = abs(w[k, k])
            for r in range(k + 1, n):
                if abs(w[r, k]) > big:
                    big = abs(w[r, k])
                    piv = r
            if big == 0.0:
                return 0.0
            if piv != k:
                for s in range(n):
                    tmp = w[k, s]
                    w[k, s] = w[piv, s]
                    w[piv, s] = tmp
                det = -det
            det *= w[k, k]
            for r in range(k + 1, n):
                f = w[r, k] / w[k, k]
                for s in range(k + 1, n):
                    w[r, s] -= f * w[k, s]
        return det

    @njit(cache=True)
    def _compound_nb(m, combos):
        nc = combos.shape[0]
        p = combos.shape[1]
        out = np.empty((nc, nc))
        if p == 0:
            out[0, 0] = 1.0
            return out
        sub = np.empty((p, p))
        for i in range(nc):
            for j in range(nc):
                for r in range(p):
                    for s in range(p):
                        sub[r, s] = m[combos[i, r], combos[j, s]]
                out[i, j] = _small_det(sub)
        return out

    @njit(cache=True)
    def _koszul_ricci_nb(c):
        n = c.shape[0]
        # nab[a, e, d] = g(nabla_{u_a} u_d, u_e)
        nab = np.empty((n, n, n))
        for a in range(n):
            for d in range(n):
                for e in range(n):
                    nab[a, e, d] = 0.5 * (c[e, a, d] - c[a, d, e] + c[d, e, a])
        ric = np.zeros((n, n))
        for a in range(n):
            for b in range(n):
                # row a of R(u_a, u_b) = N_a N_b - N_b N_a - sum_c c^c_ab N_c
                for col in range(n):
                    acc = 0.0
                    for m in range(n):
                        acc += nab[a, a, m] * nab[b, m, col] - nab[b, a, m] * nab[a, m, col]
                    for k in range(n):
                        acc -= c[k, a, b] * nab[k, a, col]
                    ric[b, col] += acc
        return ric

    @njit(cache=True)
    def _gl_operator_nb(dmat, src, pos, tgt, col, sgn, rows):
        out = np.zeros((rows, rows))
        for t in range(src.shape[0]):
            if tgt[t] >= 0:
                out[tgt[t], src[t]] += sgn[t] * dmat[pos[t], col[t]]
        return out

    NUMBA_KERNELS = {
        "scatter_product": _scatter_product_nb,
        "operator": _operator_nb,
        "compound": _compound_nb,
        "koszul_ricci": _koszul_ricci_nb,
        "gl_operator": _gl_operator_nb,
    }
else:  # pragma: no cover
    NUMBA_KERNELS = dict(NUMPY_KERNELS)

_active = NUMBA_KERNELS if USE_NUMBA else NUMPY_KERNELS

scatter_product = _active["scatter_product"]
operator = _active["operator"]
compound = _active["compound"]
koszul_ricci = _active["koszul_ricci"]
gl_operator = _active["gl_operator"]
