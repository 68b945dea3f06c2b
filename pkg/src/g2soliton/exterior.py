"""Exterior algebra over R^n for n <= 9.

A :class:`Form` stores the coefficients of a homogeneous p-form against the
basis monomials ``e^{i1...ip}`` (``i1 < ... < ip``, 1-based) in lexicographic
order.  Storage is a dense float64 vector of length ``C(n, p)``; the public
:attr:`Form.coeffs` view is the sparse map of non-zero entries.  All products
are driven by precomputed index tables, so the heavy lifting happens in
:mod:`g2soliton._kernels`.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb
from typing import Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import InputError, NumericError

MAX_DIM = 9
DEFAULT_ATOL = 1e-9


def _perm_sign(seq: Sequence[int]) -> int:
    inv = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inv += 1
    return -1 if inv % 2 else 1


def canonical(indices: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Return ``(sign, sorted_indices)``; sign is 0 when an index repeats."""
    idx = tuple(indices)
    if len(set(idx)) != len(idx):
        return 0, tuple(sorted(idx))
    return _perm_sign(idx), tuple(sorted(idx))


# ---------------------------------------------------------------------------
# index tables (0-based internally)


@lru_cache(maxsize=None)
def basis(n: int, p: int) -> tuple[tuple[int, ...], ...]:
    """0-based increasing index tuples of grade ``p`` in lexicographic order."""
    return tuple(itertools.combinations(range(n), p))


@lru_cache(maxsize=None)
def basis_array(n: int, p: int) -> np.ndarray:
    return np.array(basis(n, p), dtype=np.int64).reshape(comb(n, p), p)


@lru_cache(maxsize=None)
def _position(n: int, p: int) -> dict:
    return {I: k for k, I in enumerate(basis(n, p))}


@lru_cache(maxsize=None)
def _wedge_table(n: int, p: int, q: int):
    pos = _position(n, p + q)
    ia, ib, ik, sg = [], [], [], []
    for a, I in enumerate(basis(n, p)):
        for b, J in enumerate(basis(n, q)):
            if set(I) & set(J):
                continue
            s = sum(1 for i in I for j in J if i > j)
            ia.append(a)
            ib.append(b)
            ik.append(pos[tuple(sorted(I + J))])
            sg.append(-1.0 if s % 2 else 1.0)
    return (
        np.array(ia, dtype=np.int64),
        np.array(ib, dtype=np.int64),
        np.array(ik, dtype=np.int64),
        np.array(sg, dtype=np.float64),
    )


@lru_cache(maxsize=None)
def _interior_table(n: int, p: int):
    pos = _position(n, p - 1)
    src, vec, tgt, sg = [], [], [], []
    for s, I in enumerate(basis(n, p)):
        for a, i in enumerate(I):
            src.append(s)
            vec.append(i)
            tgt.append(pos[I[:a] + I[a + 1 :]])
            sg.append(-1.0 if a % 2 else 1.0)
    return (
        np.array(src, dtype=np.int64),
        np.array(vec, dtype=np.int64),
        np.array(tgt, dtype=np.int64),
        np.array(sg, dtype=np.float64),
    )


@lru_cache(maxsize=None)
def _gl_table(n: int, p: int):
    pos = _position(n, p)
    src, row, tgt, col, sg = [], [], [], [], []
    for s, I in enumerate(basis(n, p)):
        for a, i in enumerate(I):
            for j in range(n):
                new = I[:a] + (j,) + I[a + 1 :]
                sign, key = canonical(new)
                src.append(s)
                row.append(i)
                col.append(j)
                tgt.append(pos[key] if sign else -1)
                sg.append(float(sign))
    return (
        np.array(src, dtype=np.int64),
        np.array(row, dtype=np.int64),
        np.array(tgt, dtype=np.int64),
        np.array(col, dtype=np.int64),
        np.array(sg, dtype=np.float64),
    )


@lru_cache(maxsize=None)
def _complement_table(n: int, p: int):
    pos = _position(n, n - p)
    tgt, sg = [], []
    for I in basis(n, p):
        rest = tuple(i for i in range(n) if i not in I)
        tgt.append(pos[rest])
        sg.append(float(_perm_sign(I + rest)))
    return np.array(tgt, dtype=np.int64), np.array(sg, dtype=np.float64)


# ---------------------------------------------------------------------------


class Form:
    """Homogeneous exterior form of grade ``grade`` over R^``dim``.

    Construct from a mapping of 1-based index tuples to coefficients; keys in
    any order are brought to canonical increasing order with the permutation
    sign, keys with a repeated index contribute nothing.

    >>> Form(7, 2, {(2, 1): 3.0}).coeffs
    {(1, 2): -3.0}
    """

    __slots__ = ("dim", "grade", "_data")
    __hash__ = None  # equality is tolerance-based

    def __init__(self, dim: int, grade: int, coeffs: Mapping[Sequence[int], float] | None = None):
        if not 1 <= dim <= MAX_DIM:
            raise InputError(f"dimension must be in 1..{MAX_DIM}, got {dim}")
        if grade < 0:
            raise InputError(f"grade must be non-negative, got {grade}")
        self.dim = dim
        self.grade = grade
        data = np.zeros(comb(dim, grade) if grade <= dim else 0)
        if coeffs:
            pos = _position(dim, grade) if grade <= dim else {}
            for key, val in coeffs.items():
                key = tuple(int(k) for k in key)
                if len(key) != grade:
                    raise InputError(f"index {key} does not have length {grade}")
                if any(not 1 <= k <= dim for k in key):
                    raise InputError(f"index {key} out of range 1..{dim}")
                sign, can = canonical(k - 1 for k in key)
                if sign:
                    data[pos[can]] += sign * float(val)
        data.flags.writeable = False
        self._data = data

    @classmethod
    def from_array(cls, dim: int, grade: int, data) -> Form:
        arr = np.array(data, dtype=np.float64)
        expected = comb(dim, grade) if grade <= dim else 0
        if arr.shape != (expected,):
            raise InputError(f"expected {expected} coefficients for grade {grade} in dim {dim}")
        out = cls.__new__(cls)
        out.dim = dim
        out.grade = grade
        arr.flags.writeable = False
        out._data = arr
        return out

    @classmethod
    def zero(cls, dim: int, grade: int) -> Form:
        return cls(dim, grade)

    @classmethod
    def monomial(cls, dim: int, *indices: int, coeff: float = 1.0) -> Form:
        return cls(dim, len(indices), {tuple(indices): coeff})

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def coeffs(self) -> dict[tuple[int, ...], float]:
        return {
            tuple(i + 1 for i in I): float(c)
            for I, c in zip(basis(self.dim, self.grade), self._data)
            if c != 0.0
        }

    def __getitem__(self, key: Sequence[int]) -> float:
        sign, can = canonical(k - 1 for k in key)
        if not sign or len(can) != self.grade:
            return 0.0
        return sign * float(self._data[_position(self.dim, self.grade)[can]])

    def _check_same(self, other: Form) -> None:
        if not isinstance(other, Form):
            raise InputError(f"expected a Form, got {type(other).__name__}")
        if other.dim != self.dim or other.grade != self.grade:
            raise InputError(
                f"incompatible forms: (dim {self.dim}, grade {self.grade}) "
                f"vs (dim {other.dim}, grade {other.grade})"
            )

    def __add__(self, other: Form) -> Form:
        self._check_same(other)
        return Form.from_array(self.dim, self.grade, self._data + other._data)

    def __sub__(self, other: Form) -> Form:
        self._check_same(other)
        return Form.from_array(self.dim, self.grade, self._data - other._data)

    def __neg__(self) -> Form:
        return Form.from_array(self.dim, self.grade, -self._data)

    def __mul__(self, scalar: float) -> Form:
        return Form.from_array(self.dim, self.grade, float(scalar) * self._data)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> Form:
        return Form.from_array(self.dim, self.grade, self._data / float(scalar))

    def __xor__(self, other: Form) -> Form:
        return wedge(self, other)

    def norm_inf(self) -> float:
        return float(np.max(np.abs(self._data))) if self._data.size else 0.0

    def allclose(self, other: Form, atol: float = DEFAULT_ATOL, rtol: float = 0.0) -> bool:
        self._check_same(other)
        return bool(np.allclose(self._data, other._data, atol=atol, rtol=rtol))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Form) or other.dim != self.dim or other.grade != self.grade:
            return NotImplemented
        return self.allclose(other)

    def is_zero(self, atol: float = DEFAULT_ATOL) -> bool:
        return self.norm_inf() <= atol

    def __repr__(self) -> str:
        return f"Form(dim={self.dim}, grade={self.grade}, {format_form(self)})"

    def __str__(self) -> str:
        return format_form(self)


def format_number(x: float, precision: int = 12) -> str:
    s = format(float(x), f".{precision}g")
    return "0" if s in ("-0", "0") else s


def format_form(a: Form, precision: int = 12, chop: float = 0.0) -> str:
    """Render as a signed sum of ``c*e<digits>`` terms, e.g. ``2*e12 - 4*e56``.

    Coefficients with magnitude ``<= chop`` are dropped; the zero form renders
    as ``0``.
    """
    parts = []
    for I, c in zip(basis(a.dim, a.grade), a.data):
        if c == 0.0 or abs(c) <= chop:
            continue
        mono = "e" + "".join(str(i + 1) for i in I)
        mag = format_number(abs(c), precision)
        if mag == "0":
            continue
        sign = "-" if c < 0 else "+"
        parts.append((sign, f"{mag}*{mono}"))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, term in parts[1:]:
        out += f" {sign} {term}"
    return out


def _check_dims(a: Form, b: Form) -> None:
    if a.dim != b.dim:
        raise InputError(f"dimension mismatch: {a.dim} vs {b.dim}")


def wedge(a: Form, b: Form) -> Form:
    """Exterior product; grades above ``dim`` give the zero form of that grade."""
    _check_dims(a, b)
    n, p, q = a.dim, a.grade, b.grade
    if p + q > n:
        return Form.zero(n, p + q)
    ia, ib, ik, sg = _wedge_table(n, p, q)
    out = _kernels.scatter_product(a.data, b.data, ia, ib, ik, sg, comb(n, p + q))
    return Form.from_array(n, p + q, out)


def wedge_operator(b: Form, p: int) -> np.ndarray:
    """Matrix of ``a -> a ^ b`` from grade ``p`` to grade ``p + b.grade``."""
    n, q = b.dim, b.grade
    rows, cols = comb(n, p + q) if p + q <= n else 0, comb(n, p)
    if p + q > n:
        return np.zeros((0, cols))
    ia, ib, ik, sg = _wedge_table(n, p, q)
    return _kernels.operator(b.data, ia, ib, ik, sg, rows, cols)


def interior(v, a: Form) -> Form:
    """Contraction ``iota_v a``."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (a.dim,):
        raise InputError(f"vector of length {v.shape} does not match dim {a.dim}")
    if a.grade < 1:
        raise InputError("interior product of a 0-form is undefined")
    src, vec, tgt, sg = _interior_table(a.dim, a.grade)
    out = _kernels.scatter_product(a.data, v, src, vec, tgt, sg, comb(a.dim, a.grade - 1))
    return Form.from_array(a.dim, a.grade - 1, out)


def interior_operator(v, n: int, p: int) -> np.ndarray:
    """Matrix of ``iota_v`` from grade ``p`` to grade ``p - 1``."""
    v = np.asarray(v, dtype=np.float64)
    src, vec, tgt, sg = _interior_table(n, p)
    return _kernels.operator(v, src, vec, tgt, sg, comb(n, p - 1), comb(n, p))


def compound_matrix(m: np.ndarray, p: int) -> np.ndarray:
    """p-th compound: entry ``(I, J)`` is the minor ``det m[I, J]``."""
    m = np.ascontiguousarray(m, dtype=np.float64)
    return _kernels.compound(m, basis_array(m.shape[0], p))


def gl_operator(D, n: int, p: int) -> np.ndarray:
    """Matrix of the derivation action ``theta(D)`` on grade-``p`` forms."""
    D = np.ascontiguousarray(D, dtype=np.float64)
    if p == 0:
        return np.zeros((1, 1))
    src, row, tgt, col, sg = _gl_table(n, p)
    return _kernels.gl_operator(D, src, row, tgt, col, sg, comb(n, p))


def gl_action(D, a: Form) -> Form:
    """theta(D)a(x1, ..., xp) = sum_k a(x1, ..., D xk, ..., xp).

    On a covector this is ``e^i -> sum_j D[i, j] e^j``; a diagonal D with
    entries d multiplies ``e^I`` by ``sum(d[I])``.
    """
    D = np.asarray(D, dtype=np.float64)
    if D.shape != (a.dim, a.dim):
        raise InputError(f"endomorphism of shape {D.shape} does not match dim {a.dim}")
    return Form.from_array(a.dim, a.grade, gl_operator(D, a.dim, a.grade) @ a.data)


class Metric:
    """Positive definite inner product on R^n with an orientation.

    ``volume_form`` is ``orientation * sqrt(det g) e^{1...n}``.
    """

    __slots__ = ("matrix", "inverse", "chol", "orientation", "volume_form")

    def __init__(self, matrix, orientation: int = 1):
        g = np.array(matrix, dtype=np.float64)
        n = g.shape[0]
        if g.shape != (n, n) or not 1 <= n <= MAX_DIM:
            raise InputError(f"metric must be a square matrix of size <= {MAX_DIM}")
        if not np.allclose(g, g.T, atol=1e-12, rtol=0.0):
            raise InputError("metric matrix is not symmetric")
        g = 0.5 * (g + g.T)
        try:
            L = np.linalg.cholesky(g)
        except np.linalg.LinAlgError as exc:
            raise NumericError("metric is not positive definite") from exc
        if orientation not in (1, -1):
            raise InputError("orientation must be +1 or -1")
        inv = np.linalg.inv(g)
        for arr in (g, inv, L):
            arr.flags.writeable = False
        self.matrix = g
        self.inverse = inv
        self.chol = L
        self.orientation = orientation
        vol = orientation * float(np.prod(np.diag(L)))
        self.volume_form = Form.from_array(n, n, [vol])

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, n: int) -> Metric:
        return cls(np.eye(n))

    def frame(self) -> np.ndarray:
        """Columns form a g-orthonormal basis: ``U^T g U = I``."""
        return np.linalg.inv(self.chol).T


def form_inner(a: Form, b: Form, g: Metric) -> float:
    """Induced inner product; orthonormal monomials have unit norm."""
    a._check_same(b)
    if g.dim != a.dim:
        raise InputError("metric dimension does not match the forms")
    return float(a.data @ compound_matrix(g.inverse, a.grade) @ b.data)


def form_norm_sq(a: Form, g: Metric) -> float:
    return form_inner(a, a, g)


def hodge_star(a: Form, g: Metric) -> Form:
    """Hodge star relative to ``g`` and its volume form.

    Computed in the orthonormal coframe ``theta = L^T e`` (``g = L L^T``):
    coefficients are pulled into that coframe through the compound of
    ``L^{-T}``, starred by complementing indices, and pushed back through the
    compound of ``L``.
    """
    if g.dim != a.dim:
        raise InputError("metric dimension does not match the form")
    n, p = a.dim, a.grade
    L = g.chol
    on = compound_matrix(np.linalg.inv(L).T, p).T @ a.data
    tgt, sg = _complement_table(n, p)
    starred = np.zeros(comb(n, n - p))
    starred[tgt] = g.orientation * sg * on
    return Form.from_array(n, n - p, compound_matrix(L, n - p) @ starred)


def top_pairing(a: Form, b: Form) -> float:
    """Coefficient of ``e^{1...n}`` in ``a ^ b`` for complementary grades."""
    _check_dims(a, b)
    if a.grade + b.grade != a.dim:
        raise InputError("grades are not complementary")
    tgt, sg = _complement_table(a.dim, a.grade)
    return float(np.sum(sg * a.data * b.data[tgt]))


def endo(matrix) -> np.ndarray:
    """Validate and return an endomorphism matrix (read-only copy)."""
    m = np.array(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"endomorphism must be square, got shape {m.shape}")
    m.flags.writeable = False
    return m
