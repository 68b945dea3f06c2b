import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import e, inner_oracle, random_form, wedge_oracle
from g2soliton.catalog import PHI_0
from g2soliton.errors import InputError, NumericError
from g2soliton.exterior import (
    Form,
    Metric,
    form_inner,
    form_norm_sq,
    format_form,
    gl_action,
    hodge_star,
    interior,
    wedge,
)


def random_metric(rng, n):
    a = rng.standard_normal((n, n)) * 0.4 + np.eye(n)
    return Metric(a @ a.T + 0.1 * np.eye(n))


# --- wedge -----------------------------------------------------------------


def test_wedge_examples():
    assert wedge(e(1), e(2)) == e(1, 2)
    assert wedge(e(3, 7), e(4)) == -e(3, 4, 7)
    assert wedge(e(1, 2), e(1, 2)).is_zero(0.0)


def test_wedge_above_top_degree_is_zero():
    out = wedge(e(1, 2, 3, 4), e(5, 6, 7, 1))
    assert out.grade == 8 and out.data.size == 0


def test_wedge_dimension_mismatch():
    with pytest.raises(InputError):
        wedge(e(1, n=7), e(1, n=6))


def test_canonical_keys_on_construction():
    f = Form(7, 3, {(7, 2, 1): 2.0, (1, 1, 2): 5.0})
    assert f.coeffs == {(1, 2, 7): -2.0}
    assert f[(2, 1, 7)] == 2.0


grades = st.tuples(st.integers(0, 3), st.integers(0, 3))


@settings(max_examples=30, deadline=None)
@given(grades, st.integers(0, 2**31 - 1))
def test_wedge_matches_tensor_oracle(pq, seed):
    rng = np.random.default_rng(seed)
    a = random_form(rng, 5, pq[0])
    b = random_form(rng, 5, pq[1])
    assert wedge(a, b).allclose(wedge_oracle(a, b), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(grades, st.integers(0, 2**31 - 1))
def test_wedge_graded_anticommutative(pq, seed):
    rng = np.random.default_rng(seed)
    p, q = pq
    a, b = random_form(rng, 7, p), random_form(rng, 7, q)
    assert wedge(a, b).allclose((-1) ** (p * q) * wedge(b, a), atol=1e-12)


# --- interior --------------------------------------------------------------


def test_interior_examples():
    E = np.eye(7)
    assert interior(E[6], e(1, 2, 7)) == e(1, 2)
    assert interior(E[0], e(1, 2)) == e(2)
    assert interior(E[6], PHI_0) == e(1, 2) + e(3, 4) + e(5, 6)


def test_interior_of_function_rejected():
    with pytest.raises(InputError):
        interior(np.ones(7), Form(7, 0, {(): 1.0}))


@settings(max_examples=40, deadline=None)
@given(grades, st.integers(0, 2**31 - 1))
def test_interior_antiderivation(pq, seed):
    rng = np.random.default_rng(seed)
    p, q = pq[0] + 1, pq[1]
    a, b = random_form(rng, 7, p), random_form(rng, 7, q)
    v = rng.standard_normal(7)
    lhs = interior(v, wedge(a, b))
    rhs = wedge(interior(v, a), b)
    if q:
        rhs = rhs + (-1) ** p * wedge(a, interior(v, b))
    assert lhs.allclose(rhs, atol=1e-11)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2**31 - 1))
def test_interior_squares_to_zero(p, seed):
    rng = np.random.default_rng(seed)
    a = random_form(rng, 7, p)
    v = rng.standard_normal(7)
    assert interior(v, interior(v, a)).norm_inf() < 1e-12


# --- inner product and Hodge star ------------------------------------------


def test_inner_examples():
    g = Metric.identity(7)
    assert form_inner(e(1, 2), e(1, 2), g) == 1.0
    tau_h = 2 * e(1, 2) + 2 * e(3, 4) - 4 * e(5, 6)
    assert form_norm_sq(tau_h, g) == pytest.approx(24.0, abs=1e-12)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0, 3.7])
def test_inner_alpha_drops_out(alpha):
    g = Metric(np.diag([1.0] * 6 + [alpha**2 / 4]))
    tau = 4 * e(1, 2) - 2 * e(3, 4) - 2 * e(5, 6)
    # Gram-determinant evaluation: 16 + 4 + 4, no e^7 present
    assert form_norm_sq(tau, g) == pytest.approx(24.0, abs=1e-12)


def test_inner_grade_mismatch():
    with pytest.raises(InputError):
        form_inner(e(1), e(1, 2), Metric.identity(7))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2**31 - 1))
def test_inner_matches_tensor_contraction(p, seed):
    rng = np.random.default_rng(seed)
    g = random_metric(rng, 5)
    a, b = random_form(rng, 5, p), random_form(rng, 5, p)
    assert form_inner(a, b, g) == pytest.approx(inner_oracle(a, b, g.inverse), rel=1e-10, abs=1e-12)


def test_star_examples():
    g = Metric.identity(7)
    assert hodge_star(e(1), g) == e(2, 3, 4, 5, 6, 7)
    tau_h = 2 * e(1, 2) + 2 * e(3, 4) - 4 * e(5, 6)
    expected = -16 * (e(1, 2, 7) + e(3, 4, 7)) + 8 * e(5, 6, 7)
    assert hodge_star(wedge(tau_h, tau_h), g).allclose(expected, atol=1e-12)


@pytest.mark.parametrize("p", range(8))
def test_star_involution(p):
    rng = np.random.default_rng(p)
    g = random_metric(rng, 7)
    a = random_form(rng, 7, p)
    assert hodge_star(hodge_star(a, g), g).allclose(a, atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 7), st.integers(0, 2**31 - 1))
def test_star_characterisation(p, seed):
    rng = np.random.default_rng(seed)
    g = random_metric(rng, 7)
    a, b = random_form(rng, 7, p), random_form(rng, 7, p)
    lhs = wedge(a, hodge_star(b, g))
    rhs = form_inner(a, b, g) * g.volume_form
    assert lhs.allclose(rhs, atol=1e-10)


def test_star_respects_orientation():
    g_pos, g_neg = Metric(np.eye(7)), Metric(np.eye(7), orientation=-1)
    assert hodge_star(e(1), g_neg) == -hodge_star(e(1), g_pos)


def test_metric_validation():
    with pytest.raises(InputError):
        Metric([[1.0, 0.5], [0.0, 1.0]])
    with pytest.raises(NumericError):
        Metric(np.diag([1.0, -1.0]))
    g = Metric(np.diag([4.0, 9.0]))
    assert g.volume_form.data[0] == pytest.approx(6.0)
    assert np.allclose(g.inverse @ g.matrix, np.eye(2), atol=1e-10)


# --- gl action -------------------------------------------------------------


def test_gl_examples():
    assert gl_action(np.eye(7), e(1, 2, 3)) == 3 * e(1, 2, 3)
    Dh = np.diag([0.0, 0, -4, 4, 4, 4, 0])
    # weights per monomial of phi_h: 127:0 347:0 567:8 135:0 146:8 236:0 245:8
    expected = -8 * (e(1, 4, 6) + e(2, 4, 5) - e(5, 6, 7))
    assert gl_action(Dh, PHI_0).allclose(expected, atol=1e-12)


def test_gl_on_covector_is_transpose_action():
    D = np.arange(49.0).reshape(7, 7)
    # theta(D) e^i = sum_j D[i, j] e^j
    assert np.allclose(gl_action(D, e(3)).data, D[2])


@settings(max_examples=30, deadline=None)
@given(grades, st.integers(0, 2**31 - 1))
def test_gl_is_derivation_of_wedge(pq, seed):
    rng = np.random.default_rng(seed)
    D = rng.standard_normal((7, 7))
    a, b = random_form(rng, 7, pq[0]), random_form(rng, 7, pq[1])
    lhs = gl_action(D, wedge(a, b))
    rhs = wedge(gl_action(D, a), b) + wedge(a, gl_action(D, b))
    assert lhs.allclose(rhs, atol=1e-10)


def test_gl_exponential_is_pullback():
    # exp(theta(D)) agrees with pulling back by exp(D) through the compound matrix
    from scipy.linalg import expm

    from g2soliton.exterior import compound_matrix, gl_operator

    rng = np.random.default_rng(3)
    D = 0.3 * rng.standard_normal((7, 7))
    lhs = expm(gl_operator(D, 7, 3))
    rhs = compound_matrix(expm(D), 3).T
    assert np.allclose(lhs, rhs, atol=1e-10)


# --- rendering -------------------------------------------------------------


def test_format_form():
    tau = 2 * e(1, 2) + 2 * e(3, 4) - 4 * e(5, 6)
    assert format_form(tau) == "2*e12 + 2*e34 - 4*e56"
    assert format_form(-e(3, 7)) == "-1*e37"
    assert format_form(Form.zero(7, 2)) == "0"
    assert format_form(Form(7, 1, {(1,): 1 / 3})) == "0.333333333333*e1"
