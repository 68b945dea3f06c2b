import itertools
from math import factorial

import numpy as np
import pytest

from g2soliton.catalog import catalog
from g2soliton.exterior import Form, basis

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []

CATALOG_CASES = [
    ("h", {}),
    ("abelian", {}),
    ("k_alpha", {"alpha": 0.5}),
    ("k_alpha", {"alpha": 1.0}),
    ("k_alpha", {"alpha": 2.0}),
    ("g_mu", {"mu": -0.9}),
    ("g_mu", {"mu": -0.75}),
    ("g_mu", {"mu": -0.5}),
]


def case_id(case):
    name, params = case
    return name + "".join(f"-{k}{v:g}" for k, v in params.items())


@pytest.fixture(params=CATALOG_CASES, ids=case_id)
def entry(request):
    name, params = request.param
    return catalog(name, **params)


@pytest.fixture
def h():
    return catalog("h")


def e(*idx, n=7, c=1.0):
    return Form.monomial(n, *idx, coeff=c)


def random_form(rng, n, p, scale=1.0):
    return Form.from_array(n, p, scale * rng.standard_normal(len(basis(n, p))))


# ---------------------------------------------------------------------------
# brute-force tensor oracles, independent of the index tables in exterior.py


def to_tensor(a: Form) -> np.ndarray:
    n, p = a.dim, a.grade
    t = np.zeros((n,) * p)
    for I, c in zip(basis(n, p), a.data):
        for perm in itertools.permutations(range(p)):
            sign = np.linalg.det(np.eye(p)[list(perm)])
            t[tuple(I[k] for k in perm)] = round(sign) * c
    return t


def from_tensor(t: np.ndarray, n: int) -> Form:
    p = t.ndim
    return Form.from_array(n, p, [t[I] for I in basis(n, p)])


def alt(t: np.ndarray) -> np.ndarray:
    p = t.ndim
    out = np.zeros_like(t)
    for perm in itertools.permutations(range(p)):
        sign = round(np.linalg.det(np.eye(p)[list(perm)]))
        out += sign * np.transpose(t, perm)
    return out / factorial(p)


def wedge_oracle(a: Form, b: Form) -> Form:
    p, q = a.grade, b.grade
    t = np.multiply.outer(to_tensor(a), to_tensor(b))
    return from_tensor(factorial(p + q) / (factorial(p) * factorial(q)) * alt(t), a.dim)


def inner_oracle(a: Form, b: Form, ginv: np.ndarray) -> float:
    ta, tb = to_tensor(a), to_tensor(b)
    for _ in range(a.grade):
        tb = np.tensordot(ginv, tb, axes=([1], [0]))
        tb = np.moveaxis(tb, 0, -1)
    return float(np.sum(ta * tb) / factorial(a.grade))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
