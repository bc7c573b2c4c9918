"""Colored Jones functions of knots, their multisum presentations and
q-holonomic recursions, in exact arithmetic."""

from .braid import BraidWord, closure_info, label_long_knot, parse_braid
from .cyclotomic import CycloSeq, cyclotomic_to_jones, integrality_check, jones_to_cyclotomic
from .hyper import HyperTerm, build_Fw, family, multisum, parse_term
from .jones import broken_trace, jones, jones_table, quantum_trace
from .qring import CoeffPoly, CoeffRat, LaurentPoly, RatFunc

__version__ = "0.1.0"

__all__ = [
    "BraidWord",
    "CoeffPoly",
    "CoeffRat",
    "CycloSeq",
    "HyperTerm",
    "LaurentPoly",
    "RatFunc",
    "broken_trace",
    "build_Fw",
    "closure_info",
    "cyclotomic_to_jones",
    "family",
    "integrality_check",
    "jones",
    "jones_table",
    "jones_to_cyclotomic",
    "label_long_knot",
    "multisum",
    "parse_braid",
    "parse_term",
    "quantum_trace",
]
