"""Algebraic Laplacian solitons.

A closed G2-structure is an algebraic soliton when

    Q := Ric - tr(tau_phi^2)/12 Id + tau_phi^2 / 2 = -(lambda/3) Id - D

for a real ``lambda`` and a derivation ``D``.  Then ``Delta phi = lambda phi +
theta(D) phi`` with ``theta`` the derivation action of
:func:`g2soliton.exterior.gl_action`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curvature import CurvatureData, ricci
from .exterior import Form, gl_action, interior
from .g2core import G2Structure, TorsionData, analyze_positivity, is_torsion_free, torsion
from .liealg import DerivationBasis, LieAlgebra, derivation_space, is_derivation
from .liealg import ce_differential

RESIDUAL_TOL = 1e-8
STEADY_TOL = 1e-7


@dataclass(frozen=True)
class SolitonCertificate:
    lam: float
    D: np.ndarray
    residual: float
    type_tag: str  # shrinking | steady | expanding | torsion-free
    algebraic: bool
    pointwise_residual: float

    @property
    def is_soliton(self) -> bool:
        return self.type_tag == "torsion-free" or self.residual < RESIDUAL_TOL


def as_lhs(G2: G2Structure, tors: TorsionData, curv: CurvatureData) -> np.ndarray:
    n = G2.phi.dim
    T = tors.tau_endo
    return curv.ricci_endo - (tors.tr_tau_sq / 12.0) * np.eye(n) + 0.5 * (T @ T)


def classify(lam: float, torsion_free: bool = False) -> str:
    if torsion_free:
        return "torsion-free"
    if abs(lam) < STEADY_TOL:
        return "steady"
    return "expanding" if lam > 0 else "shrinking"


def design_matrix(derivations: DerivationBasis) -> np.ndarray:
    """Columns: vec(Id/3) followed by vec of each derivation basis element."""
    n = derivations.algebra.dim
    cols = [np.eye(n).reshape(-1) / 3.0] + [m.reshape(-1) for m in derivations.basis]
    return np.stack(cols, axis=1)


def verify_pointwise(G2: G2Structure, L: LieAlgebra, lam: float, D, tors: TorsionData | None = None) -> float:
    """``||Delta phi - lambda phi - theta(D) phi||_inf``."""
    if tors is None:
        tors = torsion(G2, L)
    defect = tors.laplacian_phi - lam * G2.phi - gl_action(D, G2.phi)
    return defect.norm_inf()


def solve_soliton(
    G2: G2Structure,
    L: LieAlgebra,
    tors: TorsionData | None = None,
    curv: CurvatureData | None = None,
    derivations: DerivationBasis | None = None,
) -> SolitonCertificate:
    """Least-squares solution of ``Q + (lambda/3) Id + D = 0`` over lambda and D in Der(L).

    A non-zero residual is a verdict ("not an algebraic soliton"), not an error.
    """
    if tors is None:
        tors = torsion(G2, L)
    if curv is None:
        curv = ricci(L, G2.metric)
    n = L.dim
    if is_torsion_free(tors):
        zero = np.zeros((n, n))
        zero.flags.writeable = False
        return SolitonCertificate(0.0, zero, 0.0, "torsion-free", True, tors.laplacian_phi.norm_inf())
    if derivations is None:
        derivations = derivation_space(L)

    Q = as_lhs(G2, tors, curv)
    A = design_matrix(derivations)
    x, *_ = np.linalg.lstsq(A, -Q.reshape(-1), rcond=None)
    lam = float(x[0])
    D = np.tensordot(x[1:], derivations.matrix(), axes=1) if derivations.dim else np.zeros((n, n))
    D.flags.writeable = False
    defect = Q + (lam / 3.0) * np.eye(n) + D
    residual = float(np.linalg.norm(defect) / (1.0 + np.linalg.norm(Q)))

    g = G2.metric
    D_adj = g.inverse @ D.T @ g.matrix
    algebraic = bool(is_derivation(D_adj, L).ok)
    return SolitonCertificate(
        lam,
        D,
        residual,
        classify(lam),
        algebraic,
        verify_pointwise(G2, L, lam, D, tors),
    )


def lie_derivative_left_invariant(X, G2: G2Structure, L: LieAlgebra) -> Form:
    """``L_X phi = d(iota_X phi)`` for closed ``phi`` and a left-invariant ``X``."""
    return ce_differential(interior(X, G2.phi), L)


@dataclass(frozen=True)
class Analysis:
    """Every product of the pipeline for one (algebra, phi) pair."""

    algebra: LieAlgebra
    g2: G2Structure
    torsion: TorsionData
    curvature: CurvatureData
    derivations: DerivationBasis
    certificate: SolitonCertificate


def analyze(L: LieAlgebra, phi: Form, derivations: DerivationBasis | None = None) -> Analysis:
    G2 = analyze_positivity(phi)
    tors = torsion(G2, L)
    curv = ricci(L, G2.metric)
    if derivations is None:
        derivations = derivation_space(L)
    cert = solve_soliton(G2, L, tors, curv, derivations)
    return Analysis(L, G2, tors, curv, derivations, cert)
