"""Exact arithmetic over Q(q^{1/4}) and polynomial coefficient rings."""

from .coeffpoly import CoeffPoly, CoeffRat, lcm_all
from .laurent import ONE, ZERO, LaurentPoly, NotDivisibleError, gcd, lcm
from ._parse import ParseError
from .linalg import (
    LinearSolution,
    bareiss_echelon,
    nullspace_coeffpoly,
    nullspace_fraction_free,
    nullspace_mod,
    rank_mod,
    rational_reconstruct,
    reconstruct_vector,
    solve_linear,
)
from .ratfunc import RatFunc

q = LaurentPoly.q()
v = LaurentPoly.v()
u = LaurentPoly.u()

__all__ = [
    "CoeffPoly",
    "CoeffRat",
    "LaurentPoly",
    "LinearSolution",
    "NotDivisibleError",
    "ONE",
    "ParseError",
    "RatFunc",
    "ZERO",
    "bareiss_echelon",
    "gcd",
    "lcm",
    "lcm_all",
    "nullspace_coeffpoly",
    "nullspace_fraction_free",
    "nullspace_mod",
    "q",
    "rank_mod",
    "rational_reconstruct",
    "reconstruct_vector",
    "solve_linear",
    "u",
    "v",
]
