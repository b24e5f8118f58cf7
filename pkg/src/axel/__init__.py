"""Exact checkers for Ax-Schanuel type inequalities over exponential differential fields."""

__version__ = "0.1.0"

from .expfield import ExpField, FieldElement, derive, is_constant, partial
from .lindeq import Equation, FundamentalSystem, Solution, decompose, fundamental_system, make_equation
from .transcendence import ldim_mod_C, td_over_C

__all__ = [
    "ExpField",
    "FieldElement",
    "derive",
    "is_constant",
    "partial",
    "Equation",
    "FundamentalSystem",
    "Solution",
    "decompose",
    "fundamental_system",
    "make_equation",
    "ldim_mod_C",
    "td_over_C",
    "__version__",
]
