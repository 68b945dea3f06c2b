"""Closed G2-structures on Lie algebras: torsion, curvature, algebraic Laplacian solitons and flow."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .catalog import catalog
from .errors import (
    G2Error,
    InputError,
    NotALieAlgebraError,
    NotClosedError,
    NotPositiveError,
    NumericError,
    ParseError,
)
from .exterior import Form, Metric, form_inner, gl_action, hodge_star, interior, wedge
from .g2core import analyze_positivity, is_erp, is_torsion_free, torsion
from .liealg import LieAlgebra, ce_differential, derivation_space, from_structure_equations
from .soliton import analyze, solve_soliton

__all__ = [
    "BACKEND",
    "Form",
    "G2Error",
    "InputError",
    "LieAlgebra",
    "Metric",
    "NotALieAlgebraError",
    "NotClosedError",
    "NotPositiveError",
    "NumericError",
    "ParseError",
    "analyze",
    "analyze_positivity",
    "catalog",
    "ce_differential",
    "derivation_space",
    "form_inner",
    "from_structure_equations",
    "gl_action",
    "hodge_star",
    "interior",
    "is_erp",
    "is_torsion_free",
    "solve_soliton",
    "torsion",
    "wedge",
]
