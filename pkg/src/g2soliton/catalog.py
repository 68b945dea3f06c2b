"""Built-in examples: the families g_mu and k_alpha, the steady example h, and flat R^7."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import InputError
from .exterior import Form
from .liealg import LieAlgebra


def _f(grade: int, terms: Mapping[str, float]) -> Form:
    return Form(7, grade, {tuple(int(c) for c in k): v for k, v in terms.items()})


def _two(terms: Mapping[str, float]) -> Form:
    return _f(2, terms)


def _cbrt(x: float) -> float:
    return float(np.cbrt(x))


PHI_0 = _f(3, {"127": 1, "347": 1, "567": 1, "135": 1, "146": -1, "236": -1, "245": -1})


@dataclass(frozen=True)
class Expected:
    """Closed-form values the pipeline should reproduce."""

    metric_diag: tuple | None = None
    volume: float | None = None
    tau: Form | None = None
    lam: float | None = None
    D_diag: tuple | None = None
    laplacian: Form | None = None


@dataclass(frozen=True)
class ParamSpec:
    name: str
    low: float
    high: float
    low_open: bool
    high_open: bool
    default: float

    def describe(self) -> str:
        lo = "(" if self.low_open else "["
        hi = ")" if self.high_open else "]"
        high = "inf" if np.isinf(self.high) else format(self.high, "g")
        return f"{self.name} in {lo}{format(self.low, 'g')}, {high}{hi}"

    def check(self, value: float) -> None:
        ok_lo = value > self.low if self.low_open else value >= self.low
        ok_hi = value < self.high if self.high_open else value <= self.high
        if not (np.isfinite(value) and ok_lo and ok_hi):
            raise InputError(f"parameter {self.name}={value:g} outside the valid range: {self.describe()}")


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    params: dict
    algebra: LieAlgebra
    phi: Form
    expected: Expected = field(default_factory=Expected)
    description: str = ""


def _g_mu(mu: float) -> CatalogEntry:
    s = 1.0 + mu
    diffs = [
        _two({"45": 1}),
        _two({"27": -2 * mu}),
        _two({"37": -2}),
        _two({"15": 2}),
        _two({"14": 1}),
        _two({"67": 2 * s}),
        _two({}),
    ]
    phi = _f(3, {"127": -2 * mu, "347": 1, "567": 2 * s, "135": 1, "146": -1, "236": -1, "245": -1})
    a = _cbrt(2 * mu**2 / s)
    b = _cbrt(1 / (-4 * mu * s))
    c = _cbrt(2 * s**2 / -mu)
    d = _cbrt(4 * mu * s) ** 2
    tau = _two(
        {
            "12": -2 * _cbrt(2 * mu**2 / s) ** 2,
            "34": _cbrt(2 / (mu + mu**2)) ** 2,
            "56": -2 * _cbrt(2 * s**2 / mu) ** 2,
        }
    )
    lam = 2 * (mu**2 + mu + 1) * _cbrt(2 / (mu * s)) ** 2
    D = tuple(
        -2 * x
        for x in (0.0, _cbrt(4 * s / mu**2), _cbrt(4 * mu * s), 0.0, 0.0, -_cbrt(4 * mu / s**2), 0.0)
    )
    return CatalogEntry(
        "g_mu",
        {"mu": mu},
        LieAlgebra(diffs),
        phi,
        Expected((a, a, b, b, c, c, d), _cbrt(-4 * mu * s), tau, lam, D),
        "sl(2,R) + r_{4,mu,-1-mu}: unimodular, non-solvable; expanding algebraic soliton",
    )


def _k_alpha(alpha: float) -> CatalogEntry:
    h = alpha / 2
    diffs = [
        _two({"17": -alpha}),
        _two({"35": -2}),
        _two({"25": -1, "57": -1}),
        _two({"47": h, "67": -1}),
        _two({"23": 1, "37": 1}),
        _two({"47": 1, "67": h}),
        _two({}),
    ]
    phi = _f(3, {"127": h, "347": h, "567": h, "135": 1, "146": -1, "236": -1, "245": -1})
    return CatalogEntry(
        "k_alpha",
        {"alpha": alpha},
        LieAlgebra(diffs),
        phi,
        Expected(
            (1.0,) * 6 + (alpha**2 / 4,),
            alpha / 2,
            _two({"12": 4, "34": -2, "56": -2}),
            6.0,
            (2.0, 0.0, 0.0, -4.0, 0.0, -4.0, 0.0),
        ),
        "sl(2,R) + r'_{4,alpha,-alpha/2}: unimodular, non-solvable; expanding algebraic soliton",
    )


def _h() -> CatalogEntry:
    diffs = [
        _two({}),
        _two({}),
        _two({"37": -1}),
        _two({"47": 1}),
        _two({"14": 2, "57": 1}),
        _two({"24": -2, "67": 1}),
        _two({}),
    ]
    return CatalogEntry(
        "h",
        {},
        LieAlgebra(diffs),
        PHI_0,
        Expected(
            (1.0,) * 7,
            1.0,
            _two({"12": 2, "34": 2, "56": -4}),
            0.0,
            (0.0, 0.0, -4.0, 4.0, 4.0, 4.0, 0.0),
            _f(3, {"146": -8, "245": -8, "567": 8}),
        ),
        "R x n, solvable, not unimodular; steady algebraic soliton that is not ERP",
    )


def _abelian() -> CatalogEntry:
    return CatalogEntry(
        "abelian",
        {},
        LieAlgebra.abelian(7),
        PHI_0,
        Expected((1.0,) * 7, 1.0, _two({}), 0.0, (0.0,) * 7, _f(3, {})),
        "flat R^7 with the standard torsion-free G2-structure",
    )


_PARAMS: dict[str, tuple[ParamSpec, ...]] = {
    "g_mu": (ParamSpec("mu", -1.0, -0.5, True, False, -0.5),),
    "k_alpha": (ParamSpec("alpha", 0.0, np.inf, True, True, 1.0),),
    "h": (),
    "abelian": (),
}

_BUILDERS: dict[str, Callable[..., CatalogEntry]] = {
    "g_mu": _g_mu,
    "k_alpha": _k_alpha,
    "h": _h,
    "abelian": _abelian,
}

NAMES = tuple(_BUILDERS)


def param_specs(name: str) -> tuple[ParamSpec, ...]:
    if name not in _PARAMS:
        raise InputError(f"unknown catalog entry {name!r}; choose from {', '.join(NAMES)}")
    return _PARAMS[name]


def catalog(name: str, **params: float) -> CatalogEntry:
    """Instantiate a catalog entry; missing parameters take their defaults."""
    specs = param_specs(name)
    known = {s.name for s in specs}
    extra = set(params) - known
    if extra:
        raise InputError(f"{name} takes no parameter(s) {', '.join(sorted(extra))}")
    values = {}
    for s in specs:
        v = float(params.get(s.name, s.default))
        s.check(v)
        values[s.name] = v
    return _BUILDERS[name](**values)
