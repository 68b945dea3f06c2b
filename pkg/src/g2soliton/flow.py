"""Laplacian flow d(phi)/dt = Delta_phi phi on left-invariant closed 3-forms.

The state is the 35-vector of coefficients of ``phi``.  Closedness is never
re-imposed: the right-hand side ``d tau`` is exact, so any drift of
``||d phi||`` is integrator error and is reported as a diagnostic.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, NotPositiveError
from .exterior import Form, basis
from .g2core import analyze_positivity, torsion
from .liealg import LieAlgebra, ce_differential, derivation_space
from .soliton import solve_soliton
from .curvature import ricci

DIAGNOSTICS = (
    "dphi_inf",
    "tau_norm_sq",
    "volume",
    "det_b",
    "min_metric_eig",
    "soliton_residual",
    "lambda",
)

# Dormand-Prince 5(4)
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = np.array((35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0))
_DP_B4 = np.array(
    (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
)
_DP_E = _DP_B5 - _DP_B4


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk45"  # "rk45" (adaptive Dormand-Prince) or "rk4" (fixed step)
    step: float = 1e-3  # rk4 step; initial step guess for rk45 when set via initial_step
    rtol: float = 1e-8
    atol: float = 1e-10
    max_steps: int = 10**6
    sample_stride: int = 1
    compute_soliton_residual: bool = False
    initial_step: float | None = None
    min_step: float = 1e-12

    def __post_init__(self):
        if self.method not in ("rk45", "rk4"):
            raise InputError(f"unknown integration method {self.method!r}")
        for name in ("step", "rtol", "atol", "min_step"):
            if not getattr(self, name) > 0:
                raise InputError(f"{name} must be positive")
        if self.max_steps < 1 or self.sample_stride < 1:
            raise InputError("max_steps and sample_stride must be >= 1")


@dataclass(frozen=True)
class FlowState:
    t: float
    phi: Form


@dataclass
class FlowTrace:
    samples: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=lambda: {k: [] for k in DIAGNOSTICS})
    termination: str = ""
    steps: int = 0
    rejected: int = 0

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    def column(self, name: str) -> np.ndarray:
        return np.array(self.diagnostics[name], dtype=float)


def flow_rhs(phi: Form, L: LieAlgebra) -> Form:
    """Delta_phi phi = d tau; raises if ``phi`` is not positive or not closed."""
    G2 = analyze_positivity(phi)
    return torsion(G2, L).laplacian_phi


class _Recorder:
    def __init__(self, L: LieAlgebra, cfg: IntegratorConfig):
        self.L = L
        self.cfg = cfg
        self.derivations = derivation_space(L) if cfg.compute_soliton_residual else None
        self.trace = FlowTrace()

    def record(self, t: float, y: np.ndarray) -> None:
        L = self.L
        phi = Form.from_array(L.dim, 3, y.copy())
        G2 = analyze_positivity(phi)
        tors = torsion(G2, L)
        d = self.trace.diagnostics
        d["dphi_inf"].append(ce_differential(phi, L).norm_inf())
        d["tau_norm_sq"].append(tors.tau_norm_sq)
        d["volume"].append(G2.volume_coefficient)
        d["det_b"].append(G2.det_b)
        d["min_metric_eig"].append(float(np.linalg.eigvalsh(G2.metric.matrix)[0]))
        if self.derivations is not None:
            cert = solve_soliton(G2, L, tors, ricci(L, G2.metric), self.derivations)
            d["soliton_residual"].append(cert.residual)
            d["lambda"].append(cert.lam)
        else:
            d["soliton_residual"].append(math.nan)
            d["lambda"].append(math.nan)
        self.trace.samples.append(FlowState(t, phi))


def _validate_start(phi0: Form, L: LieAlgebra) -> None:
    if phi0.grade != 3 or phi0.dim != L.dim or L.dim != 7:
        raise InputError("initial data must be a 3-form on a 7-dimensional Lie algebra")
    # positivity and closedness; errors propagate as input problems
    torsion(analyze_positivity(phi0), L)


def integrate(phi0: Form, L: LieAlgebra, t_end: float, cfg: IntegratorConfig | None = None) -> FlowTrace:
    """Integrate the Laplacian flow from ``phi0`` on ``[0, t_end]``."""
    cfg = cfg or IntegratorConfig()
    if not t_end > 0:
        raise InputError("t_end must be positive")
    _validate_start(phi0, L)
    rec = _Recorder(L, cfg)

    def f(y: np.ndarray) -> np.ndarray:
        return flow_rhs(Form.from_array(L.dim, 3, y), L).data

    y = np.array(phi0.data, dtype=np.float64)
    rec.record(0.0, y)
    if cfg.method == "rk4":
        _run_rk4(f, y, t_end, cfg, rec)
    else:
        _run_rk45(f, y, t_end, cfg, rec)
    return rec.trace


def _run_rk4(f, y, t_end, cfg, rec) -> None:
    nsteps = max(1, math.ceil(t_end / cfg.step - 1e-12))
    if nsteps > cfg.max_steps:
        nsteps = cfg.max_steps
        t_end = nsteps * cfg.step
    h = t_end / nsteps
    t = 0.0
    for k in range(1, nsteps + 1):
        try:
            k1 = f(y)
            k2 = f(y + 0.5 * h * k1)
            k3 = f(y + 0.5 * h * k2)
            k4 = f(y + h * k3)
        except NotPositiveError:
            rec.trace.termination = "positivity_lost"
            return
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t = k * h if k < nsteps else t_end
        rec.trace.steps = k
        if k % cfg.sample_stride == 0 or k == nsteps:
            try:
                rec.record(t, y)
            except NotPositiveError:
                rec.trace.termination = "positivity_lost"
                return
    rec.trace.termination = "t_end"


def _error_norm(err, y, ynew, cfg) -> float:
    scale = cfg.atol + cfg.rtol * np.maximum(np.abs(y), np.abs(ynew))
    return float(np.sqrt(np.mean((err / scale) ** 2)))


def _run_rk45(f, y, t_end, cfg, rec) -> None:
    t = 0.0
    k1 = f(y)
    if cfg.initial_step is not None:
        h = cfg.initial_step
    else:
        d0 = float(np.linalg.norm(y))
        d1 = float(np.linalg.norm(k1))
        h = 0.01 * d0 / d1 if d0 > 1e-5 and d1 > 1e-5 else 1e-3
    h = min(h, t_end)
    accepted = 0
    last_failure = None
    while t < t_end:
        if accepted >= cfg.max_steps:
            rec.trace.termination = "max_steps"
            return
        h = min(h, t_end - t)
        if h < cfg.min_step:
            rec.trace.termination = "positivity_lost" if last_failure == "positivity" else "step_underflow"
            return
        ks = [k1]
        try:
            for s in range(1, 7):
                incr = sum(a * ks[j] for j, a in enumerate(_DP_A[s]) if a != 0.0)
                ks.append(f(y + h * incr))
        except NotPositiveError:
            last_failure = "positivity"
            rec.trace.rejected += 1
            h *= 0.5
            continue
        ynew = y + h * sum(b * k for b, k in zip(_DP_B5, ks) if b != 0.0)
        err = h * sum(e * k for e, k in zip(_DP_E, ks) if e != 0.0)
        # the 7th stage was evaluated at y + h*sum(b5 * k), i.e. at ynew (FSAL)
        enorm = _error_norm(err, y, ynew, cfg)
        if enorm <= 1.0:
            t = t_end if t_end - (t + h) < 1e-14 * max(1.0, t_end) else t + h
            y = ynew
            k1 = ks[6]
            accepted += 1
            last_failure = None
            rec.trace.steps = accepted
            if accepted % cfg.sample_stride == 0 or t >= t_end:
                try:
                    rec.record(t, y)
                except NotPositiveError:
                    rec.trace.termination = "positivity_lost"
                    return
            fac = 5.0 if enorm == 0.0 else min(5.0, max(0.2, 0.9 * enorm ** -0.2))
        else:
            rec.trace.rejected += 1
            last_failure = "error"
            fac = max(0.2, 0.9 * enorm ** -0.2)
        h *= fac
    rec.trace.termination = "t_end"


def trace_header(n: int = 7) -> list[str]:
    monos = ["e" + "".join(str(i + 1) for i in I) for I in basis(n, 3)]
    return ["t", *monos, *DIAGNOSTICS]


def write_trace(trace: FlowTrace, stream) -> None:
    """CSV export: header row, then one row per sample (t, 35 coefficients, diagnostics)."""
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(trace_header())
    for i, s in enumerate(trace.samples):
        row = [repr(float(s.t))]
        row += [repr(float(c)) for c in s.phi.data]
        row += [repr(float(trace.diagnostics[k][i])) for k in DIAGNOSTICS]
        w.writerow(row)


def trace_to_text(trace: FlowTrace) -> str:
    buf = io.StringIO()
    write_trace(trace, buf)
    return buf.getvalue()


def read_trace(stream) -> tuple[list[str], np.ndarray]:
    rows = list(csv.reader(stream))
    header = rows[0]
    data = np.array([[float(x) for x in r] for r in rows[1:]], dtype=float)
    return header, data.reshape(-1, len(header))

