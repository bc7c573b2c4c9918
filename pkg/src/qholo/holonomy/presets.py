"""Printed recursions used as regression inputs, in backward form
sum_j a_j(n) f(n - j) = rhs(n) with Q = q^n."""

from __future__ import annotations

from .recurrence import Recurrence, from_backward

# 3-term recursion of the zero-framed trefoil with J(0) = 0, J(1) = 1.
TREFOIL_3TERM = {
    0: "1",
    1: "-(q^(-1)*Q + q^4*Q^(-4) - Q^(-1) - q*Q^(-2))/(q^(1/2)*(q^(-1)*Q - q^2*Q^(-1)))",
    2: "-(q^4*Q^(-4) - q^3*Q^(-2))/(q^2*Q^(-1) - q^(-1)*Q)",
}

# twist knots, cyclotomic functions c(p, n)
TWIST_M1 = {0: "1", 1: "-1"}
TWIST_P1 = {0: "1", 1: "q*Q"}
TWIST_P2 = {
    0: "1",
    1: "q*Q*(1 + q - Q + Q^2)",
    2: "q^2*Q^2*(1 - q^(-1)*Q)",
}

# figure-8 long-knot sum: second order inhomogeneous relation
FIG8_INHOM = {
    0: "1",
    1: "-q^(-2)*Q^(-2)*(1 - q^(-1)*Q)^2*(1 + q^(-1)*Q)"
    "*(q^4 + Q^4 - q^3*Q - q*Q^2 - q^3*Q^2 - q*Q^3)/((1 - Q)*(1 - q^(-3)*Q^2))",
    2: "(1 - q^(-2)*Q)*(1 - q^(-1)*Q^2)/((1 - Q)*(1 - q^(-3)*Q^2))",
}
FIG8_INHOM_RHS = "q^(-1)*Q^(-1)*(q + Q)*(-q + Q^2)/(-1 + Q)"

# figure-8 long-knot sum: third order homogeneous relation
FIG8_HOM = {
    0: "q*Q*(-1 + Q)/((q + Q)*(q - Q^2))",
    1: "q^(-1)*Q^(-1)*(-q + Q)*(q^4 + Q^4 + q^2*Q - 2*q^3*Q - q*Q^2 + q^2*Q^2 - q^3*Q^2 - 2*q*Q^3 + q^2*Q^3)"
    "/((q^2 + Q)*(-q + Q^2))",
    2: "-q^(-2)*Q^(-1)*(q^2 - Q)*(q^8 + Q^4 - 2*q^6*Q + q^7*Q - q^3*Q^2 + q^4*Q^2 - q^5*Q^2 + q*Q^3 - 2*q^2*Q^3)"
    "/((q + Q)*(q^5 - Q^2))",
    3: "q^2*Q*(-q^3 + Q)/((q^2 + Q)*(-q^5 + Q^2))",
}


def trefoil_recursion() -> Recurrence:
    return from_backward(TREFOIL_3TERM, label="trefoil 3-term")


def twist_recursion(p: int) -> Recurrence:
    table = {-1: TWIST_M1, 1: TWIST_P1, 2: TWIST_P2}
    if p not in table:
        raise KeyError(f"no printed recursion for twist parameter {p}")
    return from_backward(table[p], label=f"twist:{p}")


def figure8_inhomogeneous() -> Recurrence:
    return from_backward(FIG8_INHOM, FIG8_INHOM_RHS, label="figure-8 order 2 inhomogeneous")


def figure8_homogeneous() -> Recurrence:
    return from_backward(FIG8_HOM, label="figure-8 order 3 homogeneous")


PRINTED = {
    "trefoil": trefoil_recursion,
    "twist:-1": lambda: twist_recursion(-1),
    "twist:1": lambda: twist_recursion(1),
    "twist:2": lambda: twist_recursion(2),
    "figure8-inhomogeneous": figure8_inhomogeneous,
    "figure8-homogeneous": figure8_homogeneous,
}
