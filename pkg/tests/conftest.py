import random
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import strategies as st

from singfol.cli import corpus_dir
from singfol.dsl import parse_field, parse_spec
from singfol.exactalg.polynomial import Polynomial
from singfol.vfield import VectorField

CORPUS = corpus_dir()


def fol(text):
    return parse_spec(text).presentation()


def load(name):
    return parse_spec((CORPUS / name).read_text()).presentation()


def field(text, names=("x", "y")):
    return parse_field(text, list(names))


def corpus_foliations():
    return sorted(p.name for p in Path(CORPUS).glob("*.fol"))


@pytest.fixture
def corpus():
    return {name: load(name) for name in corpus_foliations()}


# -- random exact objects ----------------------------------------------------


def random_poly(rng, n, degree=2, terms=3, coeff=3):
    out = {}
    for _ in range(rng.randint(0, terms)):
        d = rng.randint(0, degree)
        exp = [0] * n
        for _ in range(d):
            exp[rng.randrange(n)] += 1
        out[tuple(exp)] = Fraction(rng.randint(-coeff, coeff), rng.randint(1, 2))
    return Polynomial(n, out)


def random_field(rng, n, degree=2):
    return VectorField([random_poly(rng, n, degree) for _ in range(n)], n)


@st.composite
def polynomials(draw, n=2, degree=2, max_terms=4):
    exps = st.tuples(*[st.integers(0, degree)] * n).filter(lambda e: sum(e) <= degree)
    coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=3)
    terms = draw(st.dictionaries(exps, coeffs, max_size=max_terms))
    return Polynomial(n, terms)


@st.composite
def fields(draw, n=2, degree=2):
    return VectorField([draw(polynomials(n, degree)) for _ in range(n)], n)


@pytest.fixture
def rng():
    return random.Random(1234)
