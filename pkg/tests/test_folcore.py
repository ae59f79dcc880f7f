import random
from fractions import Fraction

import pytest
from conftest import corpus_foliations, fol, load
from oracles import matrix_structure_constants
from singfol.errors import PreconditionError, StructuralError
from singfol.exactalg import module_equal
from singfol.exactalg.polynomial import Polynomial
from singfol.folcore import (
    FoliationPresentation,
    check_involutive,
    fiber_dim,
    isotropy_algebra,
    morita_report,
    projectivity_verdict,
    regularity_verdict,
    sign_definite,
    singular_locus,
    tangent_dim,
    transversality_check,
)
from singfol.vfield import PolyMap, conjugate

ORIGIN = [0, 0]


def sample_points(n, count, seed=7):
    rng = random.Random(seed)
    pts = [[Fraction(0)] * n]
    for _ in range(count - 1):
        pts.append([Fraction(rng.randint(-4, 4), rng.choice([1, 2, 3])) for _ in range(n)])
    return pts


# -- involutivity ---------------------------------------------------------------


def test_F1_involutive():
    rep = check_involutive(load("F1.fol"))
    assert rep.involutive and rep.first_failure is None
    assert all(c.member for c in rep.certificates.values())
    assert len(rep.certificates) == 6


def test_non_involutive_pair():
    rep = check_involutive(fol("vars x y\ngenerator dx\ngenerator x*dy"))
    assert not rep.involutive and rep.first_failure == (0, 1)


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_single_generator_involutive(k):
    assert check_involutive(fol(f"vars x\ngenerator x^{k}*dx")).involutive


# -- tangent and fiber dimensions ------------------------------------------------


def test_tangent_dims():
    F1 = load("F1.fol")
    assert tangent_dim(F1, ORIGIN) == 0
    assert tangent_dim(F1, [1, 0]) == 2
    for k in (1, 2, 3):
        F = load(f"x{k}.fol")
        assert tangent_dim(F, [0]) == 0 and tangent_dim(F, [1]) == 1


def test_fiber_dims_at_origin():
    assert fiber_dim(load("F0.fol"), ORIGIN) == 2
    assert fiber_dim(load("F1.fol"), ORIGIN) == 4


def test_split_fiber_dim_everywhere():
    F = load("split.fol")
    for p in sample_points(2, 10):
        assert fiber_dim(F, p) == 2


def test_float_points_rejected():
    with pytest.raises(PreconditionError):
        fiber_dim(load("F0.fol"), [0.5, 0.0])


def test_zero_foliation():
    Z = FoliationPresentation((), n=2, zero=True)
    assert tangent_dim(Z, ORIGIN) == 0 and fiber_dim(Z, ORIGIN) == 0
    assert isotropy_algebra(Z, ORIGIN).dim == 0
    with pytest.raises(StructuralError):
        FoliationPresentation((), n=2)


@pytest.mark.parametrize("name", corpus_foliations())
def test_fiber_and_tangent_relations(name):
    F = load(name)
    L = singular_locus(F)
    for p in sample_points(F.n, 8):
        t, f = tangent_dim(F, p), fiber_dim(F, p)
        assert f >= t
        if t == L.generic_tangent_rank:
            assert f == t
        assert isotropy_algebra(F, p).dim == f - t


ALTERNATIVES = [
    ("F1.fol", "vars x y\ngenerator x*dx + y*dx\ngenerator y*dy\ngenerator y*dx\ngenerator x*dy - x*dx\ngenerator x*dx"),
    ("F0.fol", "vars x y\ngenerator x*dx + y*dy + y*dx - x*dy\ngenerator y*dx - x*dy"),
    ("split.fol", "vars x y\ngenerator x*dx + x*dy\ngenerator dy\ngenerator x^2*dx"),
]


@pytest.mark.parametrize("name,text", ALTERNATIVES)
def test_fiber_dim_presentation_independent(name, text):
    F, G = load(name), fol(text)
    assert module_equal(F.generators, G.generators)
    for p in sample_points(2, 10):
        assert fiber_dim(F, p) == fiber_dim(G, p)


# -- isotropy Lie algebras ---------------------------------------------------------


@pytest.mark.parametrize("name,dim,center,derived,semisimple", [
    ("gl2.fol", 4, 1, 3, False),
    ("sl2.fol", 3, 0, 3, True),
])
def test_isotropy_of_linear_actions(name, dim, center, derived, semisimple):
    alg = isotropy_algebra(load(name), ORIGIN)
    assert alg.dim == dim
    assert not alg.is_abelian()
    assert alg.center_dim() == center and alg.derived_dim() == derived
    assert alg.is_semisimple() == semisimple
    for b in alg.basis:
        assert not any(b.evaluate(ORIGIN))
    oracle = matrix_structure_constants(alg.basis)
    for (i, j), coords in oracle.items():
        assert alg.structure_constants[i][j] == coords


def test_isotropy_single_generator_abelian():
    alg = isotropy_algebra(load("x1.fol"), [0])
    assert alg.dim == 1 and alg.is_abelian()


def test_isotropy_requires_involutive():
    with pytest.raises(PreconditionError):
        isotropy_algebra(fol("vars x y\ngenerator dx\ngenerator x*dy"), ORIGIN)


@pytest.mark.parametrize("name", corpus_foliations())
def test_structure_constants_are_lie(name):
    F = load(name)
    for p in sample_points(F.n, 3):
        alg = isotropy_algebra(F, p)  # asserts antisymmetry and Jacobi internally
        c = alg.structure_constants
        for i in range(alg.dim):
            for j in range(alg.dim):
                assert c[i][j] == [-v for v in c[j][i]]


# -- loci and verdicts --------------------------------------------------------


def test_F1_locus():
    L = singular_locus(load("F1.fol"))
    assert L.generic_tangent_rank == 2
    x, y = Polynomial.var(2, 0), Polynomial.var(2, 1)
    gb = set(L.tangent_drop_gb)
    assert {x ** 2, x * y, y ** 2} <= gb
    assert L.generic_fiber_dim == 2 and L.fiber_jump_ideal


def test_split_locus_projective():
    L = singular_locus(load("split.fol"))
    assert L.generic_fiber_dim == 2 and L.fiber_jump_ideal == []


def test_full_locus_contains_one():
    L = singular_locus(load("full2.fol"))
    assert L.generic_tangent_rank == 2
    assert any(p.is_constant() for p in L.tangent_drop_gb)
    assert regularity_verdict(load("full2.fol")).kind == "regular"


def test_verdict_examples():
    v = regularity_verdict(load("x2.fol"))
    assert v.kind == "not_regular" and v.witness == [0]
    assert projectivity_verdict(load("x2.fol")).kind == "projective"
    assert regularity_verdict(load("positive.fol")).kind == "regular"
    assert projectivity_verdict(load("F1.fol")).kind == "not_projective"
    assert projectivity_verdict(load("F0.fol")).kind == "projective"


def test_undetermined_when_no_real_witness():
    # drop locus is x^2 - 2 = 0: real zeros, but irrational
    v = regularity_verdict(fol("vars x\ngenerator (x^2 - 2)*dx"))
    assert v.kind == "undetermined"


def test_sign_definite():
    x = Polynomial.var(2, 0)
    y = Polynomial.var(2, 1)
    assert sign_definite(x ** 2 + y ** 4 + 1)
    assert sign_definite(-(x ** 2) - 3)
    assert not sign_definite(x ** 2 + y ** 2)
    assert not sign_definite(x ** 2 - 1)


@pytest.mark.parametrize("name", corpus_foliations())
def test_regular_means_constant_dims(name):
    F = load(name)
    if regularity_verdict(F).kind != "regular":
        return
    dims = {(tangent_dim(F, p), fiber_dim(F, p)) for p in sample_points(F.n, 20)}
    assert len(dims) == 1
    (t, f), = dims
    assert t == f


# -- involutivity under coordinate changes ------------------------------------


@pytest.mark.parametrize("name", [n for n in corpus_foliations()])
def test_involutivity_invariant_under_affine_maps(name):
    F = load(name)
    n = F.n
    mat = [[int(i == j) + (1 if j == i + 1 else 0) for j in range(n)] for i in range(n)]
    phi = PolyMap.affine(mat, [Fraction(1, 2)] * n)
    G = F.with_generators([conjugate(X, phi) for X in F.generators])
    assert check_involutive(G).involutive == check_involutive(F).involutive


# -- transversality and reports -------------------------------------------------


def test_transversality_examples():
    t = Polynomial.var(1, 0)
    xdx = load("x1.fol")
    proj = PolyMap([Polynomial.var(2, 0)])
    assert transversality_check(proj, xdx, [3, 5])
    const = PolyMap([Polynomial.zero(1)])
    assert not transversality_check(const, xdx, [0])
    rot = fol("vars x y\ngenerator y*dx - x*dy")
    incl = PolyMap([t, Polynomial.zero(1)])
    assert transversality_check(incl, rot, [1])


def test_morita_reports():
    gl2 = morita_report(load("gl2.fol"), ORIGIN)
    sl2 = morita_report(load("sl2.fol"), ORIGIN)
    assert gl2.isotropy.dim == 4 and sl2.isotropy.dim == 3
    assert "isotropy_dim" in gl2.differs(sl2)
    F0 = morita_report(load("F0.fol"), ORIGIN)
    F1 = morita_report(load("F1.fol"), ORIGIN)
    assert (F0.fiber_dim, F1.fiber_dim) == (2, 4)
    assert F0.differs(F1)
    assert gl2.differs(morita_report(load("gl2.fol"), ORIGIN)) == []
