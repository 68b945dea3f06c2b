"""G2-structures on 7-dimensional Lie algebras.

A 3-form ``phi`` is positive when the symmetric form

    b(u, v) e^{1...7} = 1/6 iota_u phi ^ iota_v phi ^ phi

has non-zero determinant and ``det(b)^(-1/9) b`` is positive definite.  Then
``g = det(b)^(-1/9) b`` and ``vol = det(b)^(1/9) e^{1...7}``.

For closed ``phi`` the intrinsic torsion is the 2-form ``tau`` with
``d*phi = tau ^ phi = -*tau``, and the Hodge Laplacian of ``phi`` is ``d tau``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import InputError, NotClosedError, NotPositiveError, NumericError
from .exterior import (
    Form,
    Metric,
    _complement_table,
    basis,
    form_norm_sq,
    hodge_star,
    interior_operator,
    wedge,
    wedge_operator,
)
from .liealg import LieAlgebra, ce_differential

DET_TOL = 1e-12
CLOSED_TOL = 1e-10
MEMBERSHIP_TOL = 1e-8
ERP_TOL = 1e-8
TORSION_FREE_TOL = 1e-12


@dataclass(frozen=True)
class G2Structure:
    phi: Form
    b_matrix: np.ndarray
    metric: Metric
    volume: Form

    @property
    def det_b(self) -> float:
        return float(np.linalg.det(self.b_matrix))

    @property
    def volume_coefficient(self) -> float:
        return float(self.volume.data[0])


@dataclass(frozen=True)
class TorsionData:
    tau: Form
    tau_norm_sq: float
    tau_endo: np.ndarray
    tr_tau_sq: float
    laplacian_phi: Form
    closed_residual: float = 0.0
    solve_residual: float = 0.0
    membership_residual: float = 0.0
    star_phi: Form | None = field(default=None, repr=False)


class ErpCheck(NamedTuple):
    ok: bool
    residual: Form


def b_matrix(phi: Form) -> np.ndarray:
    """Matrix of ``b(e_i, e_j)``: the e^{1...7} coefficient of 1/6 iota_i phi ^ iota_j phi ^ phi."""
    n = phi.dim
    eye = np.eye(n)
    iotas = np.stack([interior_operator(eye[i], n, 3) @ phi.data for i in range(n)], axis=1)
    fives = wedge_operator(phi, 2) @ iotas  # columns iota_j phi ^ phi
    tgt, sg = _complement_table(n, 2)
    b = (iotas * sg[:, None]).T @ fives[tgt] / 6.0
    return 0.5 * (b + b.T)


def analyze_positivity(phi: Form) -> G2Structure:
    """Decide positivity of ``phi``; raises :class:`NotPositiveError` with a witness."""
    if not isinstance(phi, Form) or phi.dim != 7 or phi.grade != 3:
        raise InputError("a G2-structure is a 3-form on a 7-dimensional space")
    b = b_matrix(phi)
    det = float(np.linalg.det(b))
    # det b scales like c^63 under phi -> c^3 phi, so compare against |b|^7
    scale = float(np.linalg.norm(b, 2)) ** 7
    if not np.isfinite(det) or abs(det) <= DET_TOL * scale or scale == 0.0:
        raise NotPositiveError("determinant", det)
    root = float(np.cbrt(np.cbrt(det)))  # real ninth root, sign-preserving
    g = b / root
    eig = np.linalg.eigvalsh(g)
    if eig[0] <= 0.0:
        raise NotPositiveError("definiteness", float(eig[0]))
    if root < 0.0:
        raise NotPositiveError(
            "orientation",
            root,
            hint="phi induces the negative orientation; flip the sign of phi",
        )
    b.flags.writeable = False
    metric = Metric(g)
    return G2Structure(phi, b, metric, Form.from_array(7, 7, [root]))


def is_positive(phi: Form) -> bool:
    try:
        analyze_positivity(phi)
    except NotPositiveError:
        return False
    return True


def torsion_operator(phi: Form) -> np.ndarray:
    """Matrix of ``sigma -> sigma ^ phi`` on 2-forms (21 x 21 in dimension 7)."""
    return wedge_operator(phi, 2)


def two_form_matrix(a: Form) -> np.ndarray:
    """Antisymmetric ``T[i, j] = a(e_i, e_j)``."""
    n = a.dim
    t = np.zeros((n, n))
    for (i, j), v in zip(basis(n, 2), a.data):
        t[i, j] = v
        t[j, i] = -v
    return t


def torsion(G2: G2Structure, L: LieAlgebra) -> TorsionData:
    phi, g = G2.phi, G2.metric
    if L.dim != phi.dim:
        raise InputError("Lie algebra and 3-form dimensions differ")
    dphi = ce_differential(phi, L)
    closed_res = dphi.norm_inf()
    if closed_res >= CLOSED_TOL:
        raise NotClosedError(closed_res)

    star_phi = hodge_star(phi, g)
    rhs = ce_differential(star_phi, L).data
    W = torsion_operator(phi)
    sol, _, rank, _ = np.linalg.lstsq(W, rhs, rcond=None)
    if rank < W.shape[1]:
        raise NumericError(f"torsion system is singular (rank {rank} < {W.shape[1]})")
    tau = Form.from_array(7, 2, sol)
    solve_res = float(np.max(np.abs(W @ sol - rhs))) if rhs.size else 0.0

    scale = 1.0 + tau.norm_inf()
    member_res = (wedge(tau, phi) + hodge_star(tau, g)).norm_inf()
    if member_res >= MEMBERSHIP_TOL * scale or solve_res >= MEMBERSHIP_TOL * scale:
        raise NumericError(
            f"torsion solve failed: solve residual {solve_res:.3e}, "
            f"tau ^ phi + *tau residual {member_res:.3e}"
        )

    T = two_form_matrix(tau)
    tau_endo = -g.inverse @ T
    tau_endo.flags.writeable = False
    return TorsionData(
        tau=tau,
        tau_norm_sq=form_norm_sq(tau, g),
        tau_endo=tau_endo,
        tr_tau_sq=float(np.trace(tau_endo @ tau_endo)),
        laplacian_phi=ce_differential(tau, L),
        closed_residual=closed_res,
        solve_residual=solve_res,
        membership_residual=member_res,
        star_phi=star_phi,
    )


def codifferential(a: Form, G2: G2Structure, L: LieAlgebra) -> Form:
    """delta = (-1)^(n(p+1)+1) * d *; on 3-forms in dimension 7 this is -*d*."""
    n, p = a.dim, a.grade
    sign = -1.0 if (n * (p + 1) + 1) % 2 else 1.0
    g = G2.metric
    return sign * hodge_star(ce_differential(hodge_star(a, g), L), g)


def hodge_laplacian(a: Form, G2: G2Structure, L: LieAlgebra) -> Form:
    """(d delta + delta d) a, independent of the torsion solve."""
    out = ce_differential(codifferential(a, G2, L), L)
    if a.grade < a.dim:
        out = out + codifferential(ce_differential(a, L), G2, L)
    return out


def erp_residual(G2: G2Structure, tors: TorsionData) -> Form:
    g = G2.metric
    tt = hodge_star(wedge(tors.tau, tors.tau), g)
    return tors.laplacian_phi - (tors.tau_norm_sq / 6.0) * G2.phi - tt / 6.0


def is_erp(G2: G2Structure, tors: TorsionData, tol: float = ERP_TOL) -> ErpCheck:
    """Extremally Ricci pinched test: d tau = |tau|^2 phi / 6 + *(tau ^ tau) / 6."""
    res = erp_residual(G2, tors)
    return ErpCheck(res.norm_inf() < tol, res)


def is_torsion_free(tors: TorsionData, tol: float = TORSION_FREE_TOL) -> bool:
    return tors.tau_norm_sq < tol
