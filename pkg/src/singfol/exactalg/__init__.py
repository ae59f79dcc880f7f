"""Exact polynomial and module algebra over the rationals."""

from .groebner import (
    Certificate,
    GroebnerBasis,
    combine,
    contains,
    groebner,
    is_groebner,
    membership,
    module_equal,
    normal_form,
    syzygies,
)
from .polynomial import GREVLEX, LEX, FreeModuleElement, MonomialOrder, Polynomial, as_fraction


def poly_arith(a, b, op):
    """``op`` is ``"add"``, ``"mul"`` or ``("partial_derivative", i)`` (``b`` unused)."""
    if isinstance(op, tuple) and op[0] == "partial_derivative":
        return a.derivative(op[1])
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


__all__ = [
    "Certificate",
    "FreeModuleElement",
    "GREVLEX",
    "GroebnerBasis",
    "LEX",
    "MonomialOrder",
    "Polynomial",
    "as_fraction",
    "combine",
    "contains",
    "groebner",
    "is_groebner",
    "membership",
    "module_equal",
    "normal_form",
    "poly_arith",
    "syzygies",
]
