import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CATALOG_CASES, e
from g2soliton.catalog import NAMES, PHI_0, catalog, param_specs
from g2soliton.errors import InputError, ParseError
from g2soliton.exterior import Form, format_form
from g2soliton.soliton import analyze
from g2soliton.textio import (
    load_problem,
    parse_expression,
    parse_problem,
    problem_from_algebra,
    render_certificate,
    render_matrix,
    render_problem,
    render_report,
)

H_TEXT = """\
# the steady example
dim 7
de 3 = -1*e37
de 4 = 1*e47
de 5 = 2*e14 + 1*e57     # trailing comment
de 6 = -2*e24 + e67
phi = e127 + e347 + e567 + e135 - e146 - e236 - e245
"""


# --- catalog ---------------------------------------------------------------


def test_catalog_examples():
    assert catalog("h").phi == PHI_0
    k = catalog("k_alpha", alpha=1.0)
    assert k.phi == 0.5 * (e(1, 2, 7) + e(3, 4, 7) + e(5, 6, 7)) + e(1, 3, 5) - e(1, 4, 6) - e(2, 3, 6) - e(2, 4, 5)
    assert set(NAMES) == {"g_mu", "k_alpha", "h", "abelian"}


@pytest.mark.parametrize("name,params", [("g_mu", {"mu": 0.0}), ("g_mu", {"mu": -1.0}), ("g_mu", {"mu": -0.4}), ("k_alpha", {"alpha": 0.0}), ("k_alpha", {"alpha": -1.0})])
def test_catalog_range_errors(name, params):
    with pytest.raises(InputError, match="outside the valid range"):
        catalog(name, **params)


def test_catalog_unknown_inputs():
    with pytest.raises(InputError):
        catalog("nope")
    with pytest.raises(InputError):
        catalog("h", mu=-0.5)


def test_catalog_defaults_and_specs():
    assert catalog("g_mu").params == {"mu": -0.5}
    assert param_specs("g_mu")[0].describe() == "mu in (-1, -0.5]"
    assert param_specs("k_alpha")[0].describe() == "alpha in (0, inf)"


def test_catalog_phi_closed(entry):
    from g2soliton.liealg import ce_differential

    assert ce_differential(entry.phi, entry.algebra).norm_inf() < 1e-12


# --- parsing ---------------------------------------------------------------


def test_parse_h_round_trips_to_catalog():
    pf = parse_problem(H_TEXT)
    h = catalog("h")
    assert pf == problem_from_algebra(h.algebra, h.phi)
    assert np.array_equal(pf.algebra().brackets, h.algebra.brackets)


def test_parse_simple_equation():
    pf = parse_problem("dim 7\nde 3 = -1*e37\nphi = e127\n")
    assert pf.diffs[2] == -e(3, 7)
    assert all(pf.diffs[k].is_zero(0.0) for k in (0, 1, 3, 4, 5, 6))


def test_parse_caret_reports_location():
    with pytest.raises(ParseError) as info:
        parse_problem("dim 7\nde 3 = e3^e7\nphi = e127\n")
    assert (info.value.line, info.value.column) == (2, 10)
    assert "'^'" in str(info.value) and str(info.value).startswith("line 2, column 10")


@pytest.mark.parametrize(
    "text,line,col",
    [
        ("dim 7\nde 3 = 2 e37\nphi = e127\n", 2, 10),  # missing '*'
        ("dim 7\nde 3 = e378\nphi = e127\n", 2, 8),  # wrong grade
        ("dim 7\nde 3 = e38\nphi = e127\n", 2, 8),  # index out of range
        ("dim 7\nde 3 = e33\nphi = e127\n", 2, 8),  # repeated index
        ("dim 7\nde 9 = e12\nphi = e127\n", 2, 4),
        ("dim 7\nde 3 = e12 e34\nphi = e127\n", 2, 12),
        ("dim 7\nde 3 = e12 +\nphi = e127\n", 2, 13),
        ("dim 7\nde 3 =\nphi = e127\n", 2, 7),
        ("de 3 = e12\ndim 7\n", 1, 1),
        ("dim 7\ndim 7\n", 2, 1),
        ("dim 7\nde 3 = e12\nde 3 = e12\nphi = e127\n", 3, 1),
        ("dim 7\nfoo\n", 2, 1),
        ("dim x\n", 1, 5),
        ("dim 12\n", 1, 5),
    ],
)
def test_parse_error_locations(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_problem(text)
    assert (info.value.line, info.value.column) == (line, col)


def test_parse_missing_lines():
    with pytest.raises(ParseError, match="missing 'phi'"):
        parse_problem("dim 7\n")
    with pytest.raises(ParseError, match="missing 'dim'"):
        parse_problem("# nothing\n")


def test_parse_number_forms():
    f = parse_expression("1.5e-3*e12 - .25*e34 + 3.*e56 - e17", 7, 2)
    assert f == Form(7, 2, {(1, 2): 1.5e-3, (3, 4): -0.25, (5, 6): 3.0, (1, 7): -1.0})
    assert parse_expression("0", 7, 2).is_zero(0.0)
    assert parse_expression("  e12+e12 ", 7, 2) == 2 * e(1, 2)


def test_parse_rejects_non_jacobi_at_algebra_stage():
    from g2soliton.errors import NotALieAlgebraError

    pf = parse_problem("dim 7\nde 3 = -1*e36\nde 5 = 2*e14 + e57\nphi = e127\n")
    with pytest.raises(NotALieAlgebraError):
        pf.algebra()


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2**31 - 1), st.floats(-6, 6))
def test_form_render_parse_round_trip(p, seed, logscale):
    rng = np.random.default_rng(seed)
    data = rng.standard_normal(len(Form.zero(7, p).data)) * 10**logscale
    data[rng.random(data.size) < 0.4] = 0.0
    f = Form.from_array(7, p, data)
    back = parse_expression(format_form(f), 7, p)
    assert np.allclose(back.data, f.data, rtol=1e-11, atol=0)


@pytest.mark.parametrize("case", CATALOG_CASES, ids=str)
def test_problem_round_trip(case, tmp_path):
    c = catalog(case[0], **case[1])
    pf = problem_from_algebra(c.algebra, c.phi)
    text = render_problem(pf)
    assert parse_problem(text) == pf
    path = tmp_path / "p.txt"
    path.write_text(text)
    assert load_problem(path) == pf


def test_load_missing_file(tmp_path):
    with pytest.raises(InputError, match="cannot read"):
        load_problem(tmp_path / "missing.txt")


# --- report ----------------------------------------------------------------

SECTIONS = ["[algebra]", "[positivity]", "[metric]", "[torsion]", "[erp]", "[curvature]", "[soliton]", "[classification]"]


def test_report_structure_and_determinism(h):
    a = analyze(h.algebra, h.phi)
    text = render_report(a, title="h")
    heads = [line for line in text.splitlines() if line.startswith("[")]
    assert heads == SECTIONS
    assert render_report(analyze(h.algebra, h.phi), title="h") == text
    assert "tau: 2*e12 + 2*e34 - 4*e56" in text
    assert "laplacian_phi: -8*e146 - 8*e245 + 8*e567" in text
    assert "D: diag(0, 0, -4, 4, 4, 4, 0)" in text
    assert "lambda: 0\n" in text and "type: steady" in text
    assert "erp: no" in text and "unimodular: no" in text and "solvable: yes" in text


def test_report_k1():
    k = catalog("k_alpha", alpha=1.0)
    text = render_report(analyze(k.algebra, k.phi))
    assert "lambda: 6\n" in text and "type: expanding" in text
    assert "g: diag(1, 1, 1, 1, 1, 1, 0.25)" in text


def test_report_precision():
    g = catalog("g_mu", mu=-0.75)
    a = analyze(g.algebra, g.phi)
    short = render_report(a, precision=4)
    lam_line = next(line for line in short.splitlines() if line.startswith("lambda:"))
    assert len(lam_line.split(": ")[1].replace(".", "").lstrip("-")) <= 4


def test_render_matrix():
    assert render_matrix(np.diag([1.0, -2.5])) == "diag(1, -2.5)"
    assert render_matrix(np.diag([1.0, 1e-13])) == "diag(1, 0)"
    assert render_matrix([[1.0, 2.0], [3.0, 4.0]]) == "[[1, 2], [3, 4]]"


def test_render_certificate(h):
    text = render_certificate(analyze(h.algebra, h.phi).certificate)
    assert text.startswith("[soliton]\nlambda: 0\nD: diag(0, 0, -4, 4, 4, 4, 0)\n")
    assert text.rstrip().endswith("type: steady")
