"""Ricci curvature of left-invariant metrics, by two independent routes.

Both routes work in the g-orthonormal frame ``U = L^{-T}`` (``g = L L^T``).
:func:`ricci_koszul` builds the Levi-Civita connection from the Koszul formula
and contracts the curvature tensor; :func:`ricci_algebraic` uses the formula

    Ric = M - B/2 - S(ad_H)

with ``g(Mx, x) = -1/2 sum |g([x, u_i], u_j)|^2 + 1/4 sum g([u_i, u_j], x)^2``,
``B`` the Killing form and ``H`` the mean curvature vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InputError, NumericError
from .exterior import Metric
from .liealg import LieAlgebra

AGREEMENT_TOL = 1e-9


@dataclass(frozen=True)
class CurvatureData:
    ricci_bilinear: np.ndarray  # Ric(e_i, e_j)
    ricci_endo: np.ndarray  # g^{-1} Ric
    scalar_curv: float
    mean_curvature: np.ndarray  # H with g(H, x) = tr ad_x


def frame_constants(L: LieAlgebra, g: Metric, frame: np.ndarray | None = None) -> tuple:
    """Structure constants ``C[c, a, b]`` of ``[u_a, u_b] = sum_c C[c, a, b] u_c``.

    ``frame`` must have g-orthonormal columns; defaults to ``g.frame()``.
    """
    if g.dim != L.dim:
        raise InputError("metric and Lie algebra dimensions differ")
    U = g.frame() if frame is None else np.asarray(frame, dtype=np.float64)
    Uinv = np.linalg.inv(U)
    C = np.einsum("ck,kij,ia,jb->cab", Uinv, L.brackets, U, U)
    return np.ascontiguousarray(C), U


def _package(ric_on: np.ndarray, U: np.ndarray, g: Metric, H: np.ndarray) -> CurvatureData:
    ric_on = 0.5 * (ric_on + ric_on.T)
    Uinv = np.linalg.inv(U)
    bil = Uinv.T @ ric_on @ Uinv
    bil = 0.5 * (bil + bil.T)
    endo = g.inverse @ bil
    for arr in (bil, endo, H):
        arr.flags.writeable = False
    return CurvatureData(bil, endo, float(np.trace(endo)), H)


def _mean_curvature(L: LieAlgebra, g: Metric) -> np.ndarray:
    traces = np.einsum("kik->i", L.brackets)  # tr ad_{e_i}
    return g.inverse @ traces


def ricci_koszul(L: LieAlgebra, g: Metric, frame: np.ndarray | None = None) -> CurvatureData:
    C, U = frame_constants(L, g, frame)
    ric_on = _kernels.koszul_ricci(C)
    return _package(ric_on, U, g, _mean_curvature(L, g))


def ricci_algebraic(L: LieAlgebra, g: Metric, frame: np.ndarray | None = None) -> CurvatureData:
    C, U = frame_constants(L, g, frame)
    # M_ab = -1/2 sum_ij C[j, a, i] C[j, b, i] + 1/4 sum_ij C[a, i, j] C[b, i, j]
    M = -0.5 * np.einsum("jai,jbi->ab", C, C) + 0.25 * np.einsum("aij,bij->ab", C, C)
    # B_ab = tr(ad_a ad_b), (ad_a)[k, j] = C[k, a, j]
    B = np.einsum("kaj,jbk->ab", C, C)
    h_on = np.einsum("kak->a", C)  # g(H, u_a) = tr ad_{u_a}
    ad_h = np.einsum("kij,i->kj", C, h_on)
    ric_on = M - 0.5 * B - 0.5 * (ad_h + ad_h.T)
    return _package(ric_on, U, g, _mean_curvature(L, g))


def ricci(L: LieAlgebra, g: Metric, tol: float = AGREEMENT_TOL) -> CurvatureData:
    """Koszul result, cross-checked against the algebraic formula.

    Raises :class:`NumericError` when the two disagree by more than ``tol``
    (scaled by ``1 + |Ric|``).
    """
    kos = ricci_koszul(L, g)
    alg = ricci_algebraic(L, g)
    diff = float(np.max(np.abs(kos.ricci_bilinear - alg.ricci_bilinear)))
    scale = 1.0 + float(np.max(np.abs(kos.ricci_bilinear)))
    if diff > tol * scale:
        raise NumericError(f"Ricci methods disagree by {diff:.3e}")
    return kos
