"""Exact polynomial and rational-function arithmetic over the rationals."""
from .poly import MultiPoly, parse_poly, parse_expr, fmt_coeff
from .ratfunc import RatFunc, as_ratfunc
from .euclid import (
    gcd,
    lcm,
    resultant,
    squarefree_part,
    content_in,
    gcd_free_basis,
    multiplicity,
    rational_roots,
)
from .series import LaurentSeries

__all__ = [
    "MultiPoly", "parse_poly", "parse_expr", "fmt_coeff", "RatFunc", "as_ratfunc",
    "gcd", "lcm", "resultant", "squarefree_part", "content_in", "gcd_free_basis",
    "multiplicity", "rational_roots", "LaurentSeries",
]
