"""Lie algebras given by structure equations ``(de^1, ..., de^n)``.

Conventions: ``[e_i, e_j] = sum_k c^k_ij e_k`` and ``de^k(e_i, e_j) = -c^k_ij``,
so ``de^3 = -e^37`` means ``[e_3, e_7] = e_3``.
"""

from __future__ import annotations

from math import comb
from typing import NamedTuple, Sequence

import numpy as np

from .errors import InputError, NotALieAlgebraError
from .exterior import Form, basis, interior_operator, wedge_operator

JACOBI_TOL = 1e-12
SVD_CUTOFF = 1e-8
DERIVATION_TOL = 1e-9


def _null_space(a: np.ndarray, cutoff: float = SVD_CUTOFF) -> np.ndarray:
    """Orthonormal columns spanning ker(a); sigma < cutoff * sigma_max counts as zero."""
    ncols = a.shape[1]
    if a.size == 0:
        return np.eye(ncols)
    _, s, vt = np.linalg.svd(a)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        return np.eye(ncols)
    rank = int(np.sum(s > cutoff * smax))
    return vt[rank:].T.copy()


def _rank(a: np.ndarray, cutoff: float = SVD_CUTOFF) -> int:
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > cutoff * s[0]))


class LieAlgebra:
    """A validated Lie algebra.

    Attributes:
        dim: dimension n.
        diffs: tuple of n 2-forms, ``diffs[k] = de^{k+1}``.
        brackets: array ``c[k, i, j] = c^k_ij`` (0-based).
    """

    __slots__ = ("dim", "diffs", "brackets", "_d")

    def __init__(self, diffs: Sequence[Form]):
        diffs = tuple(diffs)
        n = len(diffs)
        if n == 0:
            raise InputError("need at least one structure equation")
        for k, f in enumerate(diffs):
            if not isinstance(f, Form) or f.dim != n or f.grade != 2:
                raise InputError(f"de^{k + 1} must be a 2-form over R^{n}")
        self.dim = n
        self.diffs = diffs

        c = np.zeros((n, n, n))
        for k, f in enumerate(diffs):
            for (i, j), val in zip(basis(n, 2), f.data):
                c[k, i, j] = -val
                c[k, j, i] = val
        c.flags.writeable = False
        self.brackets = c

        # d on grade p is sum_k (de^k ^ .) o iota_{e_k}
        eye = np.eye(n)
        ops = [np.zeros((n, 1))]
        for p in range(1, n + 1):
            rows = comb(n, p + 1) if p + 1 <= n else 0
            m = np.zeros((rows, comb(n, p)))
            if rows:
                for k in range(n):
                    m += wedge_operator(diffs[k], p - 1) @ interior_operator(eye[k], n, p)
            m.flags.writeable = False
            ops.append(m)
        self._d = ops

        for k, f in enumerate(diffs):
            res = float(np.max(np.abs(self._d[2] @ f.data))) if self._d[2].size else 0.0
            if res >= JACOBI_TOL:
                raise NotALieAlgebraError(k + 1, res)

    @classmethod
    def abelian(cls, n: int) -> LieAlgebra:
        return cls([Form.zero(n, 2) for _ in range(n)])

    def d_matrix(self, p: int) -> np.ndarray:
        """Matrix of the Chevalley-Eilenberg differential on grade-``p`` forms."""
        return self._d[p]

    def jacobi_residual(self) -> float:
        return max(
            (float(np.max(np.abs(self._d[2] @ f.data))) for f in self.diffs if self._d[2].size),
            default=0.0,
        )

    def ad(self, x) -> np.ndarray:
        """Matrix of ``ad_x = [x, .]``."""
        return np.einsum("kij,i->kj", self.brackets, np.asarray(x, dtype=np.float64))

    def is_abelian(self) -> bool:
        return not np.any(self.brackets)

    def __repr__(self) -> str:
        eqs = ", ".join(str(f) for f in self.diffs)
        return f"LieAlgebra(({eqs}))"


def from_structure_equations(diffs: Sequence[Form]) -> LieAlgebra:
    """Build and validate a Lie algebra; raises :class:`NotALieAlgebraError` if d^2 != 0."""
    return LieAlgebra(diffs)


def ce_differential(a: Form, L: LieAlgebra) -> Form:
    if a.dim != L.dim:
        raise InputError(f"form of dim {a.dim} on a Lie algebra of dim {L.dim}")
    if a.grade >= L.dim:
        return Form.zero(a.dim, a.grade + 1)
    return Form.from_array(a.dim, a.grade + 1, L.d_matrix(a.grade) @ a.data)


def bracket(x, y, L: LieAlgebra) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != (L.dim,) or y.shape != (L.dim,):
        raise InputError("vector length does not match the algebra")
    return np.einsum("kij,i,j->k", L.brackets, x, y)


def _derivation_system(L: LieAlgebra) -> np.ndarray:
    """Linear map vec(D) -> (D[e_i,e_j] - [De_i,e_j] - [e_i,De_j])_{i<j}.

    ``vec`` is row-major: column ``a*n + b`` holds ``D[a, b]``.
    """
    n = L.dim
    c = L.brackets
    eye = np.eye(n)
    pairs = basis(n, 2)
    rows = np.zeros((len(pairs), n, n, n))  # (pair, k, a, b)
    for r, (i, j) in enumerate(pairs):
        # D[e_i, e_j]_k = sum_m D[k, m] c^m_ij
        rows[r] += np.einsum("ka,b->kab", eye, c[:, i, j])
        # [D e_i, e_j]_k = sum_m D[m, i] c^k_mj
        rows[r] -= np.einsum("ka,b->kab", c[:, :, j], eye[i])
        # [e_i, D e_j]_k = sum_m D[m, j] c^k_im
        rows[r] -= np.einsum("ka,b->kab", c[:, i, :], eye[j])
    return rows.reshape(len(pairs) * n, n * n)


class DerivationCheck(NamedTuple):
    ok: bool
    residual: float


class DerivationBasis(NamedTuple):
    algebra: LieAlgebra
    basis: tuple  # of n x n arrays
    dim: int

    def matrix(self) -> np.ndarray:
        """Stack of basis elements, shape ``(dim, n, n)``."""
        n = self.algebra.dim
        if not self.basis:
            return np.zeros((0, n, n))
        return np.stack(self.basis)


def derivation_residual(D, L: LieAlgebra) -> float:
    D = np.asarray(D, dtype=np.float64)
    if D.shape != (L.dim, L.dim):
        raise InputError(f"endomorphism of shape {D.shape} on a Lie algebra of dim {L.dim}")
    r = _derivation_system(L) @ D.reshape(-1)
    return float(np.max(np.abs(r))) if r.size else 0.0


def is_derivation(D, L: LieAlgebra, tol: float = DERIVATION_TOL) -> DerivationCheck:
    res = derivation_residual(D, L)
    return DerivationCheck(res < tol, res)


def derivation_space(L: LieAlgebra) -> DerivationBasis:
    """Orthonormal (Frobenius) basis of Der(L) from the SVD null space."""
    n = L.dim
    ns = _null_space(_derivation_system(L))
    mats = []
    for col in ns.T:
        m = col.reshape(n, n).copy()
        m.flags.writeable = False
        mats.append(m)
    return DerivationBasis(L, tuple(mats), len(mats))


def is_unimodular(L: LieAlgebra, tol: float = 1e-10) -> bool:
    traces = np.einsum("kik->i", L.brackets)
    return bool(np.all(np.abs(traces) < tol))


def derived_series(L: LieAlgebra) -> list[int]:
    """Dimensions of g, [g, g], [[g, g], [g, g]], ... until it stabilises."""
    n = L.dim
    span = np.eye(n)
    dims = [n]
    for _ in range(n):
        if span.shape[1] == 0:
            break
        brs = np.einsum("kij,ia,jb->kab", L.brackets, span, span).reshape(n, -1)
        r = _rank(brs)
        if r == 0:
            span = np.zeros((n, 0))
        else:
            u, _, _ = np.linalg.svd(brs, full_matrices=False)
            span = u[:, :r]
        dims.append(r)
        if r == dims[-2]:
            break
    return dims


def is_solvable(L: LieAlgebra) -> bool:
    return derived_series(L)[-1] == 0
