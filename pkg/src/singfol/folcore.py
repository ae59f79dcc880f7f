"""Foliation presentations and their pointwise invariants.

Fiber dimensions are algebraic: for generators ``X_1..X_m`` with syzygy module
``S``, the fiber at ``x`` is ``Q^m / rowspace(S(x))``. All invariants here are
exact; points must be rational.
"""

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional

from .errors import PreconditionError, StructuralError
from .exactalg import groebner, membership, syzygies
from .exactalg import linalg
from .exactalg.polynomial import Polynomial, default_names
from .vfield import VectorField, jacobian_matrix, lie_bracket


class FoliationPresentation:
    """A chart dimension and a finite list of polynomial generators.

    The zero foliation is ``FoliationPresentation((), n=k, zero=True)``.
    Groebner basis and syzygies are computed lazily; recomputation is harmless.
    """

    def __init__(self, generators, n=None, names=None, name="", zero=False):
        gens = tuple(generators)
        if n is None:
            if not gens:
                raise StructuralError("empty presentation needs an explicit n")
            n = gens[0].n_vars
        if zero and gens:
            raise StructuralError("the zero foliation takes no generators")
        if not zero and not gens:
            raise StructuralError("need at least one generator (or zero=True)")
        for X in gens:
            if not isinstance(X, VectorField):
                X = VectorField(X.components, X.n_vars)
            if X.n != n:
                raise StructuralError(f"generator on R^{X.n} in a presentation on R^{n}")
            if X.is_zero():
                raise StructuralError("zero generators are not allowed")
        self.generators = tuple(VectorField(X.components, X.n_vars) for X in gens)
        self.n = n
        self.names = tuple(names) if names else tuple(default_names(n))
        if len(self.names) != n:
            raise StructuralError("one name per coordinate")
        self.name = name
        self.zero = zero
        self.meta = {}

    @property
    def m(self):
        return len(self.generators)

    def __len__(self):
        return self.m

    def __iter__(self):
        return iter(self.generators)

    def __repr__(self):
        label = f"{self.name}: " if self.name else ""
        if self.zero:
            return f"<{label}zero foliation on R^{self.n}>"
        gens = ", ".join(X.to_str(list(self.names)) for X in self.generators)
        return f"<{label}<{gens}> on R^{self.n}>"

    def with_generators(self, generators, name=None):
        return FoliationPresentation(generators, self.n, self.names, self.name if name is None else name)

    @cached_property
    def gb(self):
        return groebner(self.generators) if not self.zero else None

    @cached_property
    def syzygy_matrix(self):
        """Rows are syzygies ``s`` with ``sum s_i X_i = 0``."""
        return syzygies(self.generators) if not self.zero else []

    @cached_property
    def involutivity(self):
        return check_involutive(self)

    def evaluation_matrix(self, x):
        """Exact ``n x m`` matrix whose column j is generator j at ``x``."""
        cols = [X.evaluate(x) for X in self.generators]
        return [[cols[j][i] for j in range(self.m)] for i in range(self.n)]

    def polynomial_matrix(self):
        return [[X.components[i] for X in self.generators] for i in range(self.n)]


def exact_point(x, n=None):
    try:
        pt = [Fraction(v) if not isinstance(v, float) else None for v in x]
    except (TypeError, ValueError):
        raise PreconditionError(f"not an exact point: {x!r}") from None
    if any(v is None for v in pt):
        raise PreconditionError("this invariant needs an exact rational point, not floats")
    if n is not None and len(pt) != n:
        raise StructuralError(f"point has {len(pt)} coordinates, chart has {n}")
    return pt


# -- involutivity ---------------------------------------------------------


@dataclass
class InvolutivityReport:
    involutive: bool
    certificates: dict
    first_failure: Optional[tuple] = None


def check_involutive(F):
    certs = {}
    first = None
    for i, j in itertools.combinations(range(F.m), 2):
        bracket = lie_bracket(F.generators[i], F.generators[j])
        cert = membership(bracket, F.generators)
        certs[(i, j)] = cert
        if not cert.member and first is None:
            first = (i, j)
    return InvolutivityReport(first is None, certs, first)


# -- pointwise dimensions ----------------------------------------------------


def tangent_dim(F, x):
    """Dimension of the span of the generator values at ``x``."""
    x = exact_point(x, F.n)
    if F.zero:
        return 0
    return linalg.rank(F.evaluation_matrix(x))


def syzygy_rank(F, x):
    rows = [s.evaluate(x) for s in F.syzygy_matrix]
    return linalg.rank(rows) if rows else 0


def fiber_dim(F, x):
    """``m - rank S(x)``: dimension of the fiber of the module at ``x``."""
    x = exact_point(x, F.n)
    if F.zero:
        return 0
    return F.m - syzygy_rank(F, x)


# -- isotropy Lie algebras ---------------------------------------------------


@dataclass
class IsotropyAlgebra:
    point: list
    dim: int
    basis: list
    coefficients: list
    structure_constants: list  # c[i][j][k]: [b_i, b_j] = sum_k c[i][j][k] b_k

    def ad(self, i):
        """Matrix of ``ad(b_i)``: column j holds the coordinates of ``[b_i, b_j]``."""
        d = self.dim
        return [[self.structure_constants[i][j][k] for j in range(d)] for k in range(d)]

    def killing_form(self):
        d = self.dim
        ads = [self.ad(i) for i in range(d)]

        def trace_prod(a, b):
            return sum((a[r][s] * b[s][r] for r in range(d) for s in range(d)), Fraction(0))

        return [[trace_prod(ads[i], ads[j]) for j in range(d)] for i in range(d)]

    def killing_rank(self):
        return linalg.rank(self.killing_form()) if self.dim else 0

    def is_semisimple(self):
        return self.dim > 0 and self.killing_rank() == self.dim

    def is_abelian(self):
        return not any(c for plane in self.structure_constants for row in plane for c in row)

    def center_dim(self):
        d = self.dim
        if not d:
            return 0
        # a in center iff sum_i a_i c[i][j][k] = 0 for all j, k
        rows = [[self.structure_constants[i][j][k] for i in range(d)] for j in range(d) for k in range(d)]
        return d - linalg.rank(rows)

    def derived_dim(self):
        d = self.dim
        vecs = [self.structure_constants[i][j] for i in range(d) for j in range(i + 1, d)]
        return linalg.rank(vecs) if vecs else 0

    def sparse_constants(self):
        """``(i, j, k, c)`` for ``i < j`` and nonzero ``c``."""
        d = self.dim
        return [
            (i, j, k, self.structure_constants[i][j][k])
            for i in range(d)
            for j in range(i + 1, d)
            for k in range(d)
            if self.structure_constants[i][j][k]
        ]


def isotropy_algebra(F, x):
    """Kernel of evaluation on the fiber at ``x`` with its bracket.

    Basis classes complete the echelon basis of ``rowspace S(x)`` to the
    canonical nullspace basis of the evaluation matrix; brackets are expanded
    in generator coordinates by membership certificates and read modulo
    ``rowspace S(x)``.
    """
    x = exact_point(x, F.n)
    if F.zero:
        return IsotropyAlgebra(x, 0, [], [], [])
    if not F.involutivity.involutive:
        raise PreconditionError(f"not involutive: bracket of pair {F.involutivity.first_failure} escapes")
    m = F.m
    evm = F.evaluation_matrix(x)
    kernel = linalg.nullspace(evm, m)
    w = linalg.row_basis([s.evaluate(x) for s in F.syzygy_matrix], m)
    chosen = []
    for v in kernel:
        if not linalg.in_span(w + chosen, v):
            chosen.append(v)
    d = len(chosen)
    basis = [_combination(F, c) for c in chosen]
    consts = [[[Fraction(0)] * d for _ in range(d)] for _ in range(d)]
    frame = linalg.transpose(chosen + w, m) if chosen + w else []
    for i, j in itertools.combinations(range(d), 2):
        bracket = lie_bracket(basis[i], basis[j])
        cert = membership(bracket, F.generators)
        if not cert.member:
            raise PreconditionError("bracket of isotropy representatives left the module")
        h = [c.evaluate(x) for c in cert.coefficients]
        sol = linalg.solve(frame, h)
        if sol is None:
            raise AssertionError("bracket class does not lie in the isotropy kernel")
        for k in range(d):
            consts[i][j][k] = sol[k]
            consts[j][i][k] = -sol[k]
    alg = IsotropyAlgebra(x, d, basis, chosen, consts)
    _check_lie(alg)
    return alg


def _combination(F, coeffs):
    out = VectorField.zero(F.n)
    for c, X in zip(coeffs, F.generators):
        if c:
            out = out + X.scale(c)
    return out


def _check_lie(alg):
    c = alg.structure_constants
    d = alg.dim
    for i, j, k in itertools.product(range(d), repeat=3):
        if c[i][j][k] != -c[j][i][k]:
            raise AssertionError("structure constants are not antisymmetric")
    for i, j, k, s in itertools.product(range(d), repeat=4):
        total = sum(
            (c[i][j][t] * c[t][k][s] + c[j][k][t] * c[t][i][s] + c[k][i][t] * c[t][j][s] for t in range(d)),
            Fraction(0),
        )
        if total:
            raise AssertionError("structure constants violate the Jacobi identity")


# -- singular loci and verdicts ------------------------------------------------


def _random_point(rng, n):
    return [Fraction(rng.randint(-60, 60), rng.randint(1, 9)) for _ in range(n)]


def _generic_rank(matrix_at, n, seed, tries=12):
    rng = random.Random(seed)
    ranks = []
    for _ in range(tries):
        ranks.append(matrix_at(_random_point(rng, n)))
        top = max(ranks)
        if ranks.count(top) >= 2:
            return top
    return max(ranks)


def _poly_det(mat):
    size = len(mat)
    if size == 0:
        return None
    if size == 1:
        return mat[0][0]
    total = None
    for j in range(size):
        a = mat[0][j]
        if a.is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        sub = _poly_det(minor)
        if sub is None or sub.is_zero():
            continue
        term = a * sub if j % 2 == 0 else -(a * sub)
        total = term if total is None else total + term
    return total


def minors(mat, r, n_vars):
    """All nonzero ``r x r`` minors of a polynomial matrix (rows x cols)."""
    if r == 0:
        return [Polynomial.constant(n_vars, 1)]
    rows, cols = len(mat), len(mat[0]) if mat else 0
    out = []
    seen = set()
    for ri in itertools.combinations(range(rows), r):
        for ci in itertools.combinations(range(cols), r):
            d = _poly_det([[mat[i][j] for j in ci] for i in ri])
            if d is not None and not d.is_zero():
                key = d if d.leading_term()[1] > 0 else -d
                if key not in seen:
                    seen.add(key)
                    out.append(d)
    return out


@dataclass
class LocusReport:
    generic_tangent_rank: int
    tangent_drop_ideal: list
    generic_fiber_dim: int
    fiber_jump_ideal: list
    generic_syzygy_rank: int = 0
    tangent_drop_gb: list = field(default_factory=list)
    fiber_jump_gb: list = field(default_factory=list)


def _ideal_gb(polys, n):
    if not polys:
        return []
    from .exactalg.polynomial import FreeModuleElement

    gb = groebner([FreeModuleElement([p]) for p in polys])
    return [e.components[0] for e in gb.elements]


def _contains_one(gb_polys):
    return any(p.is_constant() and not p.is_zero() for p in gb_polys)


def singular_locus(F, seed=0):
    n = F.n
    if F.zero:
        one = [Polynomial.constant(n, 1)]
        return LocusReport(0, one, 0, [], 0, one, [])
    r = _generic_rank(lambda p: linalg.rank(F.evaluation_matrix(p)), n, seed)
    drop = minors(F.polynomial_matrix(), r, n) if r else []
    syz = F.syzygy_matrix
    if syz:
        s = _generic_rank(lambda p: syzygy_rank(F, p), n, seed + 1)
    else:
        s = 0
    jump = minors([list(v.components) for v in syz], s, n) if s else []
    return LocusReport(
        generic_tangent_rank=r,
        tangent_drop_ideal=drop,
        generic_fiber_dim=F.m - s,
        fiber_jump_ideal=jump,
        generic_syzygy_rank=s,
        tangent_drop_gb=_ideal_gb(drop, n),
        fiber_jump_gb=_ideal_gb(jump, n),
    )


@dataclass
class Verdict:
    kind: str  # "regular"/"projective", "not_regular"/"not_projective" or "undetermined"
    witness: Optional[list] = None
    reason: str = ""

    def __bool__(self):
        return self.kind in ("regular", "projective")


def sign_definite(p):
    """True when ``p`` provably never vanishes on R^n: every exponent even,
    all coefficients of one sign, nonzero constant term."""
    if p.is_zero():
        return False
    coeffs = [c for _, c in p.items()]
    if not (all(c > 0 for c in coeffs) or all(c < 0 for c in coeffs)):
        return False
    if not p.constant_value():
        return False
    return all(e % 2 == 0 for exp, _ in p.items() for e in exp)


_GRID = [Fraction(v) for v in (0, 1, -1, 2, -2, 3, -3)] + [Fraction(1, 2), Fraction(-1, 2)]


def _grid_points(n, seed, limit=6000):
    total = len(_GRID) ** n
    if total <= limit:
        yield from (list(p) for p in itertools.product(_GRID, repeat=n))
        return
    rng = random.Random(seed)
    yield [Fraction(0)] * n
    for _ in range(limit):
        yield [rng.choice(_GRID) for _ in range(n)]


def _find_common_zero(polys, n, seed):
    for p in _grid_points(n, seed):
        if all(q.evaluate(p) == 0 for q in polys):
            return p
    return None


def _verdict(ideal, gb, n, good, bad, seed, empty_is_good):
    if empty_is_good and not ideal:
        return Verdict(good, reason="no relations can drop rank")
    if _contains_one(gb):
        return Verdict(good, reason="drop ideal contains 1")
    for p in ideal:
        if sign_definite(p):
            return Verdict(good, reason=f"minor {p} has no real zeros")
    w = _find_common_zero(ideal, n, seed)
    if w is not None:
        return Verdict(bad, witness=w, reason="rank drops at a rational grid point")
    return Verdict("undetermined", reason="no rational real witness found and no certificate of emptiness")


def regularity_verdict(F, locus=None, seed=0):
    locus = locus or singular_locus(F, seed)
    if F.zero or locus.generic_tangent_rank == 0:
        return Verdict("regular", reason="tangent rank is identically zero")
    return _verdict(locus.tangent_drop_ideal, locus.tangent_drop_gb, F.n, "regular", "not_regular", seed, False)


def projectivity_verdict(F, locus=None, seed=0):
    locus = locus or singular_locus(F, seed)
    if F.zero:
        return Verdict("projective", reason="zero module")
    return _verdict(locus.fiber_jump_ideal, locus.fiber_jump_gb, F.n, "projective", "not_projective", seed, True)


def transversality_check(pi, F, x):
    """``Img(d pi) + F_{pi(x)}`` spans the tangent space of the target."""
    if pi.target_dim != F.n:
        raise StructuralError("map target is not the foliation's chart")
    x = exact_point(x, pi.source_dim)
    jac = jacobian_matrix(pi, x)
    y = pi(x)
    cols = [] if F.zero else F.evaluation_matrix(y)
    rows = [list(jac[i]) + (list(cols[i]) if cols else []) for i in range(F.n)]
    return linalg.rank(rows) == F.n


# -- Morita-invariant report -------------------------------------------------


@dataclass
class MoritaReport:
    leaf_dim: int
    codim: int
    fiber_dim: int
    isotropy: IsotropyAlgebra

    def invariants(self):
        """Quantities preserved by Hausdorff Morita equivalence at corresponding points."""
        iso = self.isotropy
        return {
            "codim": self.codim,
            "isotropy_dim": iso.dim,
            "isotropy_center_dim": iso.center_dim(),
            "isotropy_derived_dim": iso.derived_dim(),
            "isotropy_killing_rank": iso.killing_rank(),
        }

    def differs(self, other):
        """Names of invariants that disagree; nonempty certifies non-equivalence."""
        a, b = self.invariants(), other.invariants()
        return [k for k in a if a[k] != b[k]]


def morita_report(F, x):
    x = exact_point(x, F.n)
    leaf = tangent_dim(F, x)
    return MoritaReport(leaf, F.n - leaf, fiber_dim(F, x), isotropy_algebra(F, x))
