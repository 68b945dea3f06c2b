"""Problem files, form expressions and the analysis report.

Problem file grammar (line oriented, ``#`` starts a comment)::

    dim 7
    de 3 = -1*e37
    de 5 = 2*e14 + 1*e57
    phi = e127 + e347 + e567 + e135 - e146 - e236 - e245

Missing ``de k`` lines mean ``de^k = 0``.  An expression is a signed sum of
``c*e<digits>`` terms (the coefficient and ``*`` may be omitted); ``0`` is the
zero form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import InputError, ParseError
from .exterior import MAX_DIM, Form, format_form, format_number, hodge_star, wedge
from .g2core import is_erp, is_torsion_free
from .liealg import LieAlgebra, derived_series, is_solvable, is_unimodular

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)|(?P<mono>e\d+)|(?P<op>[-+*]))"
)


@dataclass(frozen=True)
class ProblemFile:
    dim: int
    diffs: tuple
    phi: Form

    def algebra(self) -> LieAlgebra:
        return LieAlgebra(self.diffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProblemFile) or other.dim != self.dim:
            return NotImplemented
        return self.phi == other.phi and all(a == b for a, b in zip(self.diffs, other.diffs))

    __hash__ = None


def _tokenize(text: str, line: int, col0: int):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[bad]!r}", line, col0 + bad + 1)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), col0 + start + 1))
        pos = m.end()
    return out


def parse_expression(text: str, dim: int, grade: int, line: int = 1, col0: int = 0) -> Form:
    """Parse a form expression such as ``2*e14 + e57``."""
    toks = _tokenize(text, line, col0)
    end_col = col0 + len(text.rstrip()) + 1
    if not toks:
        raise ParseError("empty expression", line, end_col)
    if len(toks) == 1 and toks[0][0] == "num" and float(toks[0][1]) == 0.0:
        return Form.zero(dim, grade)
    total = Form.zero(dim, grade)
    i = 0
    first = True
    while i < len(toks):
        sign = 1.0
        kind, val, col = toks[i]
        if kind == "op" and val in "+-":
            sign = -1.0 if val == "-" else 1.0
            i += 1
        elif not first:
            raise ParseError(f"expected '+' or '-' before {val!r}", line, col)
        if i >= len(toks):
            raise ParseError("expression ends after a sign", line, end_col)
        kind, val, col = toks[i]
        coef = 1.0
        if kind == "num":
            coef = float(val)
            i += 1
            if i >= len(toks) or toks[i][:2] != ("op", "*"):
                c = toks[i][2] if i < len(toks) else end_col
                raise ParseError("expected '*' after coefficient", line, c)
            i += 1
            if i >= len(toks):
                raise ParseError("expected a monomial e<digits>", line, end_col)
            kind, val, col = toks[i]
        if kind != "mono":
            raise ParseError(f"expected a monomial e<digits>, got {val!r}", line, col)
        digits = tuple(int(c) for c in val[1:])
        if len(digits) != grade:
            raise ParseError(f"monomial {val} has grade {len(digits)}, expected {grade}", line, col)
        if any(not 1 <= d <= dim for d in digits):
            raise ParseError(f"index out of range 1..{dim} in {val}", line, col)
        if len(set(digits)) != len(digits):
            raise ParseError(f"repeated index in {val}", line, col)
        total = total + Form(dim, grade, {digits: sign * coef})
        i += 1
        first = False
    return total


def parse_problem(text: str) -> ProblemFile:
    dim = None
    diffs: dict[int, Form] = {}
    phi = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        stripped = body.lstrip()
        lead = len(body) - len(stripped)
        m = re.match(r"dim\s+(\S+)\s*$", stripped)
        if m:
            if dim is not None:
                raise ParseError("duplicate 'dim' line", lineno, lead + 1)
            try:
                dim = int(m.group(1))
            except ValueError:
                raise ParseError(f"invalid dimension {m.group(1)!r}", lineno, lead + m.start(1) + 1) from None
            if not 1 <= dim <= MAX_DIM:
                raise ParseError(f"dimension must be in 1..{MAX_DIM}", lineno, lead + m.start(1) + 1)
            continue
        m = re.match(r"de\s+(\d+)\s*=", stripped)
        if m:
            if dim is None:
                raise ParseError("'dim' must precede structure equations", lineno, lead + 1)
            k = int(m.group(1))
            if not 1 <= k <= dim:
                raise ParseError(f"index out of range 1..{dim}", lineno, lead + m.start(1) + 1)
            if k in diffs:
                raise ParseError(f"duplicate equation for de {k}", lineno, lead + 1)
            diffs[k] = parse_expression(stripped[m.end():], dim, 2, lineno, lead + m.end())
            continue
        m = re.match(r"phi\s*=", stripped)
        if m:
            if dim is None:
                raise ParseError("'dim' must precede phi", lineno, lead + 1)
            if phi is not None:
                raise ParseError("duplicate 'phi' line", lineno, lead + 1)
            phi = parse_expression(stripped[m.end():], dim, 3, lineno, lead + m.end())
            continue
        raise ParseError("expected 'dim', 'de <k> =' or 'phi ='", lineno, lead + 1)
    if dim is None:
        raise ParseError("missing 'dim' line")
    if phi is None:
        raise ParseError("missing 'phi' line")
    full = tuple(diffs.get(k, Form.zero(dim, 2)) for k in range(1, dim + 1))
    return ProblemFile(dim, full, phi)


def render_problem(pf: ProblemFile, precision: int = 12) -> str:
    lines = [f"dim {pf.dim}"]
    for k, f in enumerate(pf.diffs, start=1):
        lines.append(f"de {k} = {format_form(f, precision)}")
    lines.append(f"phi = {format_form(pf.phi, precision)}")
    return "\n".join(lines) + "\n"


def problem_from_algebra(L: LieAlgebra, phi: Form) -> ProblemFile:
    return ProblemFile(L.dim, tuple(L.diffs), phi)


# ---------------------------------------------------------------------------
# report


def _num(x: float, precision: int, chop: float) -> str:
    return "0" if abs(x) <= chop else format_number(x, precision)


def _vec(v, precision: int, chop: float) -> str:
    return "(" + ", ".join(_num(x, precision, chop) for x in v) + ")"


def render_matrix(m, precision: int = 12, chop: float = 1e-10) -> str:
    m = np.asarray(m)
    off = m - np.diag(np.diag(m))
    if np.all(np.abs(off) <= chop):
        return "diag" + _vec(np.diag(m), precision, chop)
    return "[" + ", ".join("[" + ", ".join(_num(x, precision, chop) for x in row) + "]" for row in m) + "]"


def _yn(b: bool) -> str:
    return "yes" if b else "no"


def _section(title: str, items: list) -> list[str]:
    return [f"[{title}]"] + [f"{k}: {v}" for k, v in items] + [""]


def certificate_sections(cert, precision: int = 12, chop: float = 1e-10) -> list[str]:
    num = lambda x: _num(x, precision, chop)  # noqa: E731
    out = _section(
        "soliton",
        [
            ("lambda", num(cert.lam)),
            ("D", render_matrix(cert.D, precision, chop)),
            ("residual", num(cert.residual)),
            ("pointwise_residual", num(cert.pointwise_residual)),
            ("algebraic", _yn(cert.algebraic)),
            ("algebraic_soliton", _yn(cert.is_soliton)),
        ],
    )
    out += _section("classification", [("type", cert.type_tag)])
    return out


def render_certificate(cert, precision: int = 12, chop: float = 1e-10) -> str:
    return "\n".join(certificate_sections(cert, precision, chop)).rstrip("\n") + "\n"


def render_report(analysis, precision: int = 12, chop: float = 1e-10, title: str | None = None) -> str:
    """Deterministic text report of an :class:`~g2soliton.soliton.Analysis`.

    Values with magnitude ``<= chop`` print as ``0`` so round-off never
    reaches the output.
    """
    A = analysis
    L, G2, T, C = A.algebra, A.g2, A.torsion, A.curvature
    num = lambda x: _num(x, precision, chop)  # noqa: E731
    form = lambda f: format_form(f, precision, chop)  # noqa: E731
    lines = [f"# {title}", ""] if title else []
    lines += _section(
        "algebra",
        [
            ("dim", str(L.dim)),
            ("structure", "(" + ", ".join(form(f) for f in L.diffs) + ")"),
            ("jacobi_residual", num(L.jacobi_residual())),
            ("unimodular", _yn(is_unimodular(L))),
            ("solvable", _yn(is_solvable(L))),
            ("derived_series", ", ".join(str(d) for d in derived_series(L))),
            ("derivation_dim", str(A.derivations.dim)),
        ],
    )
    lines += _section(
        "positivity",
        [
            ("phi", form(G2.phi)),
            ("positive", "yes"),
            ("det_b", num(G2.det_b)),
            ("b_matrix", render_matrix(G2.b_matrix, precision, chop)),
        ],
    )
    lines += _section(
        "metric",
        [
            ("g", render_matrix(G2.metric.matrix, precision, chop)),
            ("volume", form(G2.volume)),
        ],
    )
    lines += _section(
        "torsion",
        [
            ("tau", form(T.tau)),
            ("tau_norm_sq", num(T.tau_norm_sq)),
            ("tr_tau_endo_sq", num(T.tr_tau_sq)),
            ("laplacian_phi", form(T.laplacian_phi)),
            ("torsion_free", _yn(is_torsion_free(T))),
        ],
    )
    erp = is_erp(G2, T)
    lines += _section(
        "erp",
        [
            ("star_tau_wedge_tau", form(hodge_star(wedge(T.tau, T.tau), G2.metric))),
            ("erp", _yn(erp.ok)),
            ("erp_residual", form(erp.residual)),
        ],
    )
    lines += _section(
        "curvature",
        [
            ("scalar", num(C.scalar_curv)),
            ("ricci_endo", render_matrix(C.ricci_endo, precision, chop)),
            ("mean_curvature", _vec(C.mean_curvature, precision, chop)),
        ],
    )
    lines += certificate_sections(A.certificate, precision, chop)
    return "\n".join(lines).rstrip("\n") + "\n"


def load_problem(path) -> ProblemFile:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_problem(text)
