"""Constructions: pullback along projections, products, quotients, slices.

A projection is ``post . drop . pre`` where ``drop`` keeps some coordinates and
``pre``/``post`` are optional invertible polynomial coordinate changes. Inside
the adapted chart (after ``pre``) the fiber coordinates are the dropped ones.
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import NeedsGenerators, PreconditionError, StructuralError
from .exactalg import linalg, membership, module_equal
from .exactalg.groebner import normal_form
from .exactalg.polynomial import Polynomial, default_names
from .folcore import FoliationPresentation, exact_point, transversality_check
from .vfield import PolyMap, VectorField, conjugate, lie_bracket


@dataclass
class ProjectionSpec:
    total_dim: int
    kept_indices: tuple
    pre: Optional[PolyMap] = None
    post: Optional[PolyMap] = None

    def __post_init__(self):
        self.kept_indices = tuple(self.kept_indices)
        if len(set(self.kept_indices)) != len(self.kept_indices):
            raise StructuralError("kept indices must be distinct")
        if any(not 0 <= i < self.total_dim for i in self.kept_indices):
            raise StructuralError("kept index out of range")
        for label, phi, dim in (("pre", self.pre, self.total_dim), ("post", self.post, self.base_dim)):
            if phi is None:
                continue
            if phi.source_dim != dim or phi.target_dim != dim:
                raise StructuralError(f"{label} change has the wrong dimensions")
            if phi.inverse is None:
                raise StructuralError(f"{label} change needs a verified inverse")

    @classmethod
    def dropping(cls, total_dim, dropped):
        dropped = set(dropped)
        return cls(total_dim, tuple(i for i in range(total_dim) if i not in dropped))

    @property
    def base_dim(self):
        return len(self.kept_indices)

    @property
    def fiber_indices(self):
        return tuple(i for i in range(self.total_dim) if i not in self.kept_indices)

    @property
    def k(self):
        return self.total_dim - self.base_dim

    def as_map(self):
        """The projection as a PolyMap on the total space."""
        n = self.total_dim
        drop = PolyMap([Polynomial.var(n, i) for i in self.kept_indices], n)
        phi = drop.compose(self.pre) if self.pre else drop
        return self.post.compose(phi) if self.post else phi

    def then(self, outer):
        """Projection ``outer . self`` when neither carries coordinate changes."""
        if self.pre or self.post or outer.pre or outer.post:
            raise StructuralError("composition is only defined for plain coordinate projections")
        if outer.total_dim != self.base_dim:
            raise StructuralError("projections do not compose")
        return ProjectionSpec(self.total_dim, tuple(self.kept_indices[i] for i in outer.kept_indices))


@dataclass
class SliceSpec:
    base_point: list
    directions: list  # q vectors in R^n

    def __post_init__(self):
        self.base_point = exact_point(self.base_point)
        self.directions = [exact_point(d, len(self.base_point)) for d in self.directions]
        if linalg.rank(self.directions) != len(self.directions):
            raise StructuralError("slice directions are linearly dependent")

    @property
    def n(self):
        return len(self.base_point)

    @property
    def q(self):
        return len(self.directions)

    def inclusion(self):
        """Affine map ``s -> base_point + sum s_j d_j``."""
        matrix = [[d[i] for d in self.directions] for i in range(self.n)]
        return PolyMap.affine(matrix, self.base_point, inverse=False) if self.q else None


def default_degree_cap(F):
    top = max((X.degree() for X in F.generators), default=0)
    return max(2, top + 1)


def _lift(X, n_total, kept):
    comps = [Polynomial.zero(n_total) for _ in range(n_total)]
    for j, c in zip(kept, X.components):
        comps[j] = c.embed(n_total, kept)
    return VectorField(comps, n_total)


def _fiber_fields(spec):
    return [VectorField.coordinate(spec.total_dim, v) for v in spec.fiber_indices]


def _adapt(fields, spec):
    """Original-chart fields to the adapted chart of the total space."""
    if spec.pre is None:
        return list(fields)
    return [conjugate(X, spec.pre) for X in fields]


def _unadapt(fields, spec):
    if spec.pre is None:
        return list(fields)
    return [conjugate(X, spec.pre.inverse) for X in fields]


_FRESH = ("y", "z", "w", "u", "v", "t")


def _total_names(base_names, spec):
    if spec.pre is not None:
        return tuple(default_names(spec.total_dim))
    names = [None] * spec.total_dim
    for j, i in enumerate(spec.kept_indices):
        names[i] = base_names[j]
    fresh = [c for c in _FRESH if c not in base_names]
    fresh += [f"v{i}" for i in range(spec.total_dim) if f"v{i}" not in base_names]
    for i in spec.fiber_indices:
        names[i] = fresh.pop(0)
    return tuple(names)


def pullback_projection(F, spec, names=None):
    """Pullback of ``F`` along the projection described by ``spec``."""
    if spec.base_dim != F.n:
        raise StructuralError(f"projection base has dim {spec.base_dim}, foliation lives on R^{F.n}")
    n = spec.total_dim
    base = F.generators
    if spec.post is not None and not F.zero:
        base = [conjugate(X, spec.post.inverse) for X in base]
    lifted = [] if F.zero else [_lift(X, n, spec.kept_indices) for X in base]
    gens = _unadapt(lifted + _fiber_fields(spec), spec)
    gens = [X for X in gens if not X.is_zero()]
    name = f"pullback({F.name})" if F.name else ""
    out = FoliationPresentation(gens, n, names or _total_names(F.names, spec), name, zero=not gens)
    if F.involutivity.involutive and gens and not out.involutivity.involutive:
        raise AssertionError("pullback lost involutivity")
    return out


def product(FM, FN, names=None):
    m, n = FM.n, FN.n
    left = list(range(m))
    right = list(range(m, m + n))
    gens = []
    if not FM.zero:
        gens += [_lift(X, m + n, left) for X in FM.generators]
    if not FN.zero:
        gens += [_lift(Y, m + n, right) for Y in FN.generators]
    if names is None:
        names = list(FM.names) + list(FN.names)
        if len(set(names)) != len(names):
            names = default_names(m + n)
    name = f"{FM.name}x{FN.name}" if FM.name and FN.name else ""
    return FoliationPresentation(gens, m + n, names, name, zero=not gens)


@dataclass
class QuotientReport:
    holds: bool
    certificates: dict = field(default_factory=dict)  # (fiber index, generator index) -> Certificate
    first_failure: Optional[tuple] = None

    def __bool__(self):
        return self.holds


def check_quotient_condition(F, spec):
    """``[d_v, X]`` lies in ``F + <fiber d's>`` for each fiber coordinate ``v``
    and generator ``X`` (in the adapted chart)."""
    if spec.total_dim != F.n:
        raise StructuralError("projection total space differs from the foliation chart")
    if F.zero:
        return QuotientReport(True)
    gens = _adapt(F.generators, spec)
    big = gens + _fiber_fields(spec)
    certs = {}
    first = None
    for v in spec.fiber_indices:
        dv = VectorField.coordinate(F.n, v)
        for j, X in enumerate(gens):
            cert = membership(lie_bracket(dv, X), big)
            certs[(v, j)] = cert
            if not cert.member and first is None:
                first = (v, j)
    return QuotientReport(first is None, certs, first)


def _restrict_to_base(X, spec):
    """Base components of an adapted field, as a field on the base."""
    n, kept = spec.total_dim, spec.kept_indices
    images = [Polynomial.zero(spec.base_dim) for _ in range(n)]
    for j, i in enumerate(kept):
        images[i] = Polynomial.var(spec.base_dim, j)
    return VectorField([X.components[i].substitute(images) for i in kept], spec.base_dim)


def _is_projectable(X, spec):
    return not any(X.components[i].depends_on(v) for i in spec.kept_indices for v in spec.fiber_indices)


def _monomials(n, degree):
    out = []
    for d in range(degree + 1):
        for exp in itertools.product(range(d + 1), repeat=n):
            if sum(exp) == d:
                out.append(exp)
    return out


def _sort_key(X):
    return (X.degree(), X.to_str())


def _greedy_basis(candidates, done=None):
    """Keep candidates that are not in the module of those kept so far.

    ``done(selection)`` may stop the scan early.
    """
    chosen = []
    for X in sorted(candidates, key=_sort_key):
        if X.is_zero():
            continue
        if chosen and membership(X, chosen).member:
            continue
        chosen.append(X)
        if done is not None and done(chosen):
            break
    return chosen


def _base_candidates(big, spec, degree):
    """Fields on the base of degree <= ``degree`` whose lift lies in ``<big>``.

    Membership is tested through the normal form, which is linear, so the
    candidates are a basis of the nullspace of one rational matrix.
    """
    from .exactalg import groebner

    gb = groebner(big)
    nb, n = spec.base_dim, spec.total_dim
    monos = _monomials(nb, degree)
    columns = []
    unknowns = []
    for i in range(nb):
        for exp in monos:
            Y = VectorField([Polynomial.monomial(exp) if j == i else Polynomial.zero(nb) for j in range(nb)], nb)
            rem, _ = normal_form(_lift(Y, n, spec.kept_indices), gb)
            columns.append(rem.to_sparse())
            unknowns.append(Y)
    keys = sorted({k for col in columns for k in col})
    rows = [[col.get(k, Fraction(0)) for col in columns] for k in keys]
    null = linalg.nullspace(rows, len(columns)) if rows else [
        [Fraction(int(i == j)) for i in range(len(columns))] for j in range(len(columns))
    ]
    out = []
    for vec in null:
        Y = VectorField.zero(nb)
        for c, U in zip(vec, unknowns):
            if c:
                Y = Y + U.scale(c)
        if not Y.is_zero():
            out.append(_primitive(Y))
    return out


def _primitive(X):
    """Scale so the leading coefficient of the first nonzero component is 1."""
    for c in X.components:
        if not c.is_zero():
            return X.scale(Fraction(1) / c.leading_term()[1])
    return X


def pushforward(F, spec, projectable_gens=None, degree_cap=None):
    """The foliation on the base whose pullback is ``F + <fiber d's>``."""
    quotient = check_quotient_condition(F, spec)
    if not quotient.holds:
        v, j = quotient.first_failure
        raise PreconditionError(f"quotient condition fails: [d_{v}, generator {j}] escapes F + vertical")
    names = tuple(F.names[i] for i in spec.kept_indices) if spec.pre is None else None
    big_orig = ([] if F.zero else list(F.generators)) + _unadapt(_fiber_fields(spec), spec)
    big = ([] if F.zero else _adapt(F.generators, spec)) + _fiber_fields(spec)
    post_name = f"push({F.name})" if F.name else ""

    def finish(base_fields, capped=None):
        if spec.post is not None:
            base_fields = [conjugate(Y, spec.post) for Y in base_fields]
        out = FoliationPresentation(base_fields, spec.base_dim, names, post_name, zero=not base_fields)
        back = pullback_projection(out, spec)
        back_gens = [] if back.zero else list(back.generators)
        if not module_equal(back_gens, big_orig):
            raise AssertionError("pushforward failed its pullback postcondition")
        if capped is not None:
            out.meta["degree_cap_used"] = capped
        return out

    if projectable_gens is not None:
        adapted = _adapt(projectable_gens, spec)
        for idx, Y in enumerate(adapted):
            if not _is_projectable(Y, spec):
                raise PreconditionError(f"supplied generator {idx} is not projectable")
        if not module_equal(adapted + _fiber_fields(spec), big):
            raise PreconditionError("supplied generators do not generate F + vertical")
        base = [_restrict_to_base(Y, spec) for Y in adapted]
        return finish([Y for Y in base if not Y.is_zero()])

    # the vertical fields alone may already be everything
    if module_equal(_fiber_fields(spec), big):
        return finish([])
    cap = default_degree_cap(F) if degree_cap is None else degree_cap

    def complete(selection):
        lifted = [_lift(Y, spec.total_dim, spec.kept_indices) for Y in selection]
        return module_equal(lifted + _fiber_fields(spec), big)

    for d in range(cap + 1):
        cands = _base_candidates(big, spec, d)
        if not cands:
            continue
        chosen = _greedy_basis(cands, complete)
        if complete(chosen):
            return finish(chosen, d)
    raise NeedsGenerators(f"no projectable generating set found up to degree {cap}")


def restrict_to_slice(F, slice_spec, degree_cap=None):
    """Slice foliation: restrictions of elements of F tangent to the slice.

    Unknowns are coefficient polynomials ``g_i(s)`` of degree <= cap; the normal
    components of ``sum g_i X_i`` along the slice must vanish identically.
    The result carries ``meta["degree_capped"]``.
    """
    if slice_spec.n != F.n:
        raise StructuralError("slice lives in a different chart")
    q = slice_spec.q
    iota = slice_spec.inclusion()
    if iota is None:
        raise StructuralError("a slice needs at least one direction")
    if not transversality_check(iota, F, [0] * q):
        raise PreconditionError("slice is not transverse to the foliation at its base point")
    cap = default_degree_cap(F) if degree_cap is None else degree_cap
    names = tuple(f"s{j}" for j in range(q)) if q > 1 else ("s",)
    if F.zero:
        out = FoliationPresentation((), q, names, zero=True)
        out.meta.update(degree_capped=True, degree_cap=cap)
        return out
    dirs = slice_spec.directions
    normals = linalg.nullspace(dirs, F.n)  # rows annihilating every direction
    gram = [[sum((a * b for a, b in zip(di, dj)), Fraction(0)) for dj in dirs] for di in dirs]
    gram_inv = _inverse(gram)
    left = [[sum((gram_inv[r][j] * dirs[j][i] for j in range(q)), Fraction(0)) for i in range(F.n)] for r in range(q)]
    along = [X.substitute(list(iota.components)) for X in F.generators]  # X_i(p + D s), in s
    monos = _monomials(q, cap)
    unknowns = []
    columns = []
    for i, Xs in enumerate(along):
        for exp in monos:
            mono = Polynomial.monomial(exp)
            vec = [c * mono for c in Xs.components]
            unknowns.append((i, exp))
            columns.append(vec)
    eqs = {}
    for col_idx, vec in enumerate(columns):
        for r, nrm in enumerate(normals):
            comb = Polynomial.zero(q)
            for a, p in zip(nrm, vec):
                if a and not p.is_zero():
                    comb = comb + p * a
            for exp, c in comb.items():
                eqs.setdefault((r, exp), {})[col_idx] = c
    rows = [[row.get(j, Fraction(0)) for j in range(len(columns))] for row in eqs.values()]
    null = linalg.nullspace(rows, len(columns)) if rows else [
        [Fraction(int(i == j)) for i in range(len(columns))] for j in range(len(columns))
    ]
    cands = []
    for vec in null:
        total = [Polynomial.zero(q) for _ in range(F.n)]
        for c, col in zip(vec, columns):
            if c:
                total = [t + p * c for t, p in zip(total, col)]
        tangential = []
        for r in range(q):
            acc = Polynomial.zero(q)
            for a, p in zip(left[r], total):
                if a and not p.is_zero():
                    acc = acc + p * a
            tangential.append(acc)
        Y = VectorField(tangential, q)
        if not Y.is_zero():
            cands.append(_primitive(Y))
    chosen = _greedy_basis(cands)
    out = FoliationPresentation(chosen, q, names, zero=not chosen)
    out.meta.update(degree_capped=True, degree_cap=cap)
    return out


def _inverse(a):
    n = len(a)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    red, _ = linalg.rref(aug, 2 * n)
    return [row[n:] for row in red]
