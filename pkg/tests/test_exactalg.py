from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import corpus_foliations, load, polynomials, random_poly
from oracles import brute_force_relations
from singfol.errors import StructuralError
from singfol.exactalg import (
    LEX,
    FreeModuleElement,
    MonomialOrder,
    Polynomial,
    combine,
    groebner,
    is_groebner,
    membership,
    module_equal,
    normal_form,
    poly_arith,
    syzygies,
)
from singfol.exactalg import linalg

X, Y = Polynomial.var(2, 0), Polynomial.var(2, 1)
SX, SY, SZ = sympy.symbols("x y z")


def ideal(*polys):
    return [FreeModuleElement([p]) for p in polys]


def to_sympy(p, syms=(SX, SY, SZ)):
    expr = sympy.Integer(0)
    for exp, c in p.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for s, k in zip(syms, exp):
            term *= s ** k
        expr += term
    return sympy.expand(expr)


# -- polynomial arithmetic ----------------------------------------------------


def test_difference_of_squares():
    assert poly_arith(X + Y, X - Y, "mul") == X ** 2 - Y ** 2


def test_power_rule():
    assert poly_arith(X ** 2 * Y, None, ("partial_derivative", 0)) == 2 * X * Y


def test_additive_inverse_is_empty():
    z = poly_arith(X, -X, "add")
    assert z.is_zero() and z.terms == {}


def test_no_zero_coefficients_stored():
    p = Polynomial(2, {(1, 0): Fraction(0), (0, 1): Fraction(2)})
    assert list(p.terms) == [(0, 1)]


def test_mismatched_variable_counts():
    with pytest.raises(StructuralError):
        Polynomial.var(2, 0) + Polynomial.var(3, 0)


def test_printing_is_grevlex_descending():
    p = X ** 2 * Y - Fraction(3, 2) * Y + 1
    assert p.to_str(["x", "y"]) == "x^2*y - 3/2*y + 1"


@given(polynomials(), polynomials(), polynomials())
@settings(max_examples=60, deadline=None)
def test_ring_axioms_against_sympy(a, b, c):
    assert to_sympy(a * (b + c)) == sympy.expand(to_sympy(a) * (to_sympy(b) + to_sympy(c)))
    assert (a * b) * c == a * (b * c)
    assert to_sympy(a.derivative(1)) == sympy.diff(to_sympy(a), SY)


# -- Groebner bases ---------------------------------------------------------------


def test_gb_of_variables():
    gb = groebner(ideal(X, Y))
    assert [e.components[0] for e in gb.elements] == [Y, X]
    assert gb.is_reduced


def test_gb_example_reduces_generators():
    gens = ideal(X ** 2, X * Y, Y ** 2 - X)
    gb = groebner(gens)
    assert is_groebner(gb)
    for g in gens:
        assert normal_form(g, gb)[0].is_zero()


def test_gb_disjoint_positions():
    gens = [FreeModuleElement([X, Polynomial.zero(2)]), FreeModuleElement([Polynomial.zero(2), X])]
    gb = groebner(gens)
    assert set(gb.elements) == set(gens)


def _sympy_reduced(polys, order):
    G = sympy.groebner([to_sympy(p) for p in polys], SX, SY, SZ, order=order)
    return {sympy.expand(g / sympy.Poly(g, SX, SY, SZ).LC(order=order)) for g in G.exprs}


@given(st.lists(polynomials(n=3, degree=2, max_terms=3), min_size=1, max_size=3))
@settings(max_examples=40, deadline=None)
def test_ideal_gb_matches_sympy(polys):
    polys = [p for p in polys if not p.is_zero()]
    if not polys:
        return
    for order, name in ((MonomialOrder("grevlex"), "grevlex"), (LEX, "lex")):
        gb = groebner(ideal(*polys), order)
        ours = {to_sympy(e.components[0]) for e in gb.elements}
        assert ours == _sympy_reduced(polys, name)
        assert is_groebner(gb)


@pytest.mark.parametrize("name", corpus_foliations())
def test_buchberger_criterion_on_corpus(name):
    F = load(name)
    if F.zero:
        return
    assert is_groebner(F.gb)


def test_term_over_position_order():
    order = MonomialOrder("grevlex", "top")
    F = load("F1.fol")
    gb = groebner(F.generators, order)
    assert is_groebner(gb)
    assert module_equal(list(gb.elements), list(F.generators))


# -- normal forms and membership ------------------------------------------------


def test_normal_form_example():
    rem, quots = normal_form(FreeModuleElement([X ** 2 + X * Y]), groebner(ideal(X, Y)))
    assert rem.is_zero()
    assert quots == [X, X]


def test_normal_form_constant():
    rem, _ = normal_form(FreeModuleElement([Polynomial.constant(2, 1)]), groebner(ideal(X, Y)))
    assert rem.components[0] == 1


def test_normal_form_idempotent_on_basis():
    gb = groebner(ideal(X, Y))
    for k, g in enumerate(gb.elements):
        rem, quots = normal_form(g, gb)
        assert rem.is_zero()
        assert quots == [Polynomial.constant(2, int(i == k)) for i in range(len(gb))]


@given(polynomials(degree=3, max_terms=5))
@settings(max_examples=60, deadline=None)
def test_division_invariant(p):
    gb = groebner(ideal(X ** 2 - Y, X * Y + 1, Y ** 2))
    e = FreeModuleElement([p])
    rem, quots = normal_form(e, gb)
    assert combine(quots, gb.elements) + rem == e


@given(polynomials(degree=3, max_terms=5))
@settings(max_examples=40, deadline=None)
def test_normal_form_is_canonical(p):
    a = ideal(X ** 2, X * Y, Y ** 2 - X)
    b = ideal(Y ** 2 - X, X * Y + X ** 2, X ** 2 + Y ** 2 - X)
    assert module_equal(a, b)
    e = FreeModuleElement([p])
    assert normal_form(e, groebner(a))[0] == normal_form(e, groebner(b))[0]


def test_membership_examples():
    F1 = load("F1.fol")  # x dx, y dy, y dx, x dy
    xdy = F1.generators[3]
    cert = membership(xdy, F1.generators)
    assert cert.member and list(cert.coefficients) == [0, 0, 0, 1]

    xdx = FreeModuleElement([X, Polynomial.zero(2)])
    ydy = FreeModuleElement([Polynomial.zero(2), Y])
    e = FreeModuleElement([X ** 2, X * Y])
    cert = membership(e, [xdx, ydy])
    assert cert.member and list(cert.coefficients) == [X, X]

    one = Polynomial.var(1, 0)
    cert = membership(FreeModuleElement([Polynomial.constant(1, 1)]), [FreeModuleElement([one])])
    assert not cert.member and not cert.remainder.is_zero()


def test_module_equal_examples():
    Z = Polynomial.zero(2)
    one = Polynomial.constant(2, 1)
    xdx, dy = FreeModuleElement([X, Z]), FreeModuleElement([Z, one])
    assert module_equal([xdx, dy], [dy, FreeModuleElement([X, X])])
    x1 = Polynomial.var(1, 0)
    assert not module_equal([FreeModuleElement([x1])], [FreeModuleElement([x1 ** 2])])
    assert module_equal([xdx, dy], [xdx, dy])


# -- syzygies ------------------------------------------------------------------


def test_koszul_syzygy():
    syz = syzygies(ideal(X, Y))
    assert len(syz) == 1
    s = syz[0]
    assert s.components[0] * X + s.components[1] * Y == 0
    assert {s.components[0], s.components[1]} <= {Y, -Y, X, -X}


def test_F0_has_no_syzygies():
    assert syzygies(load("F0.fol").generators) == []


def test_F1_syzygies():
    F1 = load("F1.fol")
    syz = syzygies(F1.generators)
    assert len(syz) == 2
    for s in syz:
        assert combine(s.components, F1.generators).is_zero()


@pytest.mark.parametrize("name", corpus_foliations())
def test_syzygy_soundness_on_corpus(name):
    F = load(name)
    for s in F.syzygy_matrix:
        assert combine(s.components, F.generators).is_zero()


def _completeness(gens, degree):
    syz = syzygies(gens)
    rels = brute_force_relations(list(gens), degree)
    for r in rels:
        assert combine(r.components, gens).is_zero()
        if syz:
            assert membership(r, syz).member
        else:
            pytest.fail(f"relation {r} found but no syzygies reported")


@pytest.mark.parametrize("name", corpus_foliations())
def test_syzygy_completeness_on_corpus(name):
    F = load(name)
    if F.zero or F.n > 3:
        return
    _completeness(F.generators, 2)


def test_syzygy_completeness_random(rng):
    for _ in range(8):
        n = rng.randint(1, 3)
        gens = []
        for _ in range(rng.randint(1, 4)):
            g = FreeModuleElement([random_poly(rng, n, 2, 2) for _ in range(2)], n)
            if not g.is_zero():
                gens.append(g)
        if gens:
            _completeness(gens, 2)


# -- exact linear algebra ---------------------------------------------------------


@given(st.lists(st.lists(st.fractions(-4, 4, max_denominator=3), min_size=3, max_size=3), min_size=1, max_size=4))
@settings(max_examples=60, deadline=None)
def test_linalg_against_sympy(rows):
    m = sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in r] for r in rows])
    assert linalg.rank(rows) == m.rank()
    null = linalg.nullspace(rows, 3)
    assert len(null) == 3 - m.rank()
    for v in null:
        assert not any(linalg.matvec(rows, v))
    if len(rows) == 3:
        assert linalg.det(rows) == Fraction(str(m.det()))
