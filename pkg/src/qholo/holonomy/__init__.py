"""q-holonomic machinery: operators, recurrences, telescoping and guessing."""

from .bounds import InitialBound, OrderBound, check_initial_bound, initial_bound, order_bound
from .guess import InsufficientData, guess_recurrence
from .kfree import annihilates, kfree_schedule, kfree_search, telescope_kfree
from .ore import equivalent, is_left_multiple, right_divide
from .presets import PRINTED
from .recurrence import (
    InsufficientRange,
    Recurrence,
    Sequence,
    forward_solve,
    from_backward,
    parse_rational,
    verify_recurrence,
    verify_report,
)
from .weyl import WeylOperator, op_apply, op_mul
from .zeilberger import TelescopeError, homogenize, q_zeilberger, telescope

__all__ = [
    "InitialBound",
    "InsufficientData",
    "InsufficientRange",
    "OrderBound",
    "PRINTED",
    "Recurrence",
    "Sequence",
    "TelescopeError",
    "WeylOperator",
    "annihilates",
    "check_initial_bound",
    "equivalent",
    "forward_solve",
    "from_backward",
    "guess_recurrence",
    "homogenize",
    "initial_bound",
    "is_left_multiple",
    "kfree_schedule",
    "kfree_search",
    "op_apply",
    "op_mul",
    "order_bound",
    "parse_rational",
    "q_zeilberger",
    "right_divide",
    "telescope",
    "telescope_kfree",
    "verify_recurrence",
    "verify_report",
]
