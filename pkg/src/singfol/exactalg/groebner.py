"""Groebner bases of submodules of free modules over Q[x_1..x_n].

Module elements are handled internally as flat dicts ``{(position, exponent): coeff}``.
Ideals are rank-1 modules. Syzygies and membership certificates come from one
Groebner computation on the augmented generators ``(g_i, e_i)``: with
position-over-term and the original positions dominating, the basis elements
whose original part vanishes generate the syzygy module, and reducing ``(e, 0)``
leaves ``(0, -c)`` exactly when ``e = sum c_i g_i``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from ..errors import StructuralError
from .polynomial import GREVLEX, FreeModuleElement, MonomialOrder, Polynomial


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _quot(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _lead(v, order):
    mon = max(v, key=order.module_key)
    return mon, v[mon]


def _axpy(v, g, shift, c):
    """In place ``v -= c * x^shift * g``."""
    for (pos, exp), gc in g.items():
        key = (pos, tuple(a + b for a, b in zip(exp, shift)))
        s = v.get(key, 0) - c * gc
        if s:
            v[key] = s
        else:
            v.pop(key, None)


class _Basis:
    """Sparse elements with cached leading data."""

    def __init__(self, order):
        self.order = order
        self.elems = []
        self.leads = []  # (pos, exp, coeff)

    def add(self, v):
        (pos, exp), c = _lead(v, self.order)
        self.elems.append(v)
        self.leads.append((pos, exp, c))
        return len(self.elems) - 1

    def reducer(self, pos, exp, skip=None):
        for k, (p, e, _) in enumerate(self.leads):
            if k != skip and p == pos and _divides(e, exp):
                return k
        return None


def _reduce(v, basis, track=False, skip=None):
    """Full reduction of ``v`` by ``basis``. Returns ``(remainder, quotients)``.

    Reducers are tried in basis order, first match wins.
    """
    order = basis.order
    v = dict(v)
    rem = {}
    quots = [dict() for _ in basis.elems] if track else None
    while v:
        (pos, exp), c = _lead(v, order)
        k = basis.reducer(pos, exp, skip)
        if k is None:
            rem[(pos, exp)] = c
            del v[(pos, exp)]
            continue
        _, lexp, lc = basis.leads[k]
        shift = _quot(exp, lexp)
        f = c / lc
        _axpy(v, basis.elems[k], shift, f)
        if track:
            q = quots[k]
            s = q.get(shift, 0) + f
            if s:
                q[shift] = s
            else:
                q.pop(shift, None)
    return rem, quots


def _spoly(f, lf, g, lg):
    pf, ef, cf = lf
    pg, eg, cg = lg
    lcm = _lcm(ef, eg)
    out = {}
    for (pos, exp), c in f.items():
        out[(pos, tuple(a + b for a, b in zip(exp, _quot(lcm, ef))))] = c / cf
    _axpy(out, g, _quot(lcm, eg), 1 / cg)
    return out


def _buchberger(gens, order, rank):
    basis = _Basis(order)
    for g in gens:
        if not g:
            continue
        rem, _ = _reduce(g, basis)
        if rem:
            basis.add(rem)
    pairs = set()
    for j in range(len(basis.elems)):
        for i in range(j):
            pairs.add((i, j))

    def pair_key(p):
        i, j = p
        pi, ei, _ = basis.leads[i]
        _, ej, _ = basis.leads[j]
        return (order.module_key((pi, _lcm(ei, ej))), p)

    while pairs:
        # normal strategy: smallest lcm first, ties by index
        pair = min(pairs, key=pair_key)
        pairs.discard(pair)
        i, j = pair
        li, lj = basis.leads[i], basis.leads[j]
        if li[0] != lj[0]:
            continue
        lcm = _lcm(li[1], lj[1])
        if rank == 1 and all(a == 0 or b == 0 for a, b in zip(li[1], lj[1])):
            continue  # coprime leading monomials (ideal case only)
        if _chain_skip(basis, pairs, i, j, li[0], lcm):
            continue
        s = _spoly(basis.elems[i], li, basis.elems[j], lj)
        rem, _ = _reduce(s, basis)
        if rem:
            k = basis.add(rem)
            for t in range(k):
                pairs.add((t, k))
    return basis


def _chain_skip(basis, pending, i, j, pos, lcm):
    for k, (p, e, _) in enumerate(basis.leads):
        if k in (i, j) or p != pos or not _divides(e, lcm):
            continue
        if (min(i, k), max(i, k)) not in pending and (min(j, k), max(j, k)) not in pending:
            return True
    return False


def _reduced(basis):
    """Minimal, interreduced, monic basis sorted by ascending leading monomial."""
    order = basis.order
    keep = []
    for k, (p, e, _) in enumerate(basis.leads):
        dominated = False
        for t, (p2, e2, _) in enumerate(basis.leads):
            if t == k or p2 != p or not _divides(e2, e):
                continue
            # drop k if another leading monomial divides it; ties keep the first
            if e2 != e or t < k:
                dominated = True
                break
        if not dominated:
            keep.append(basis.elems[k])
    mini = _Basis(order)
    for v in keep:
        mini.add(v)
    out = []
    for k, v in enumerate(mini.elems):
        rem, _ = _reduce(v, mini, skip=k)
        out.append(rem)
    result = []
    for v in out:
        _, c = _lead(v, order)
        result.append({m: x / c for m, x in v.items()})
    result.sort(key=lambda v: order.module_key(_lead(v, order)[0]))
    return result


def _shape(gens):
    gens = list(gens)
    if not gens:
        raise StructuralError("need at least one generator")
    rank, n_vars = gens[0].rank, gens[0].n_vars
    for g in gens:
        if not isinstance(g, FreeModuleElement):
            raise TypeError("generators must be FreeModuleElements")
        if g.rank != rank or g.n_vars != n_vars:
            raise StructuralError("generators disagree on rank or variable count")
    return gens, rank, n_vars


@dataclass(frozen=True)
class GroebnerBasis:
    order: MonomialOrder
    elements: tuple
    rank: int
    n_vars: int
    is_reduced: bool = True
    _sparse: tuple = field(default=(), repr=False, compare=False)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def leading_monomials(self):
        return [_lead(v, self.order)[0] for v in self._sparse]

    def is_unit(self):
        """True when the basis generates the whole free module."""
        lead_pos = {pos for pos, exp in self.leading_monomials() if not any(exp)}
        return lead_pos == set(range(self.rank))

    def _basis(self):
        b = _Basis(self.order)
        for v in self._sparse:
            b.add(v)
        return b


def _make_gb(sparse, order, rank, n_vars):
    elems = tuple(FreeModuleElement.from_sparse(v, rank, n_vars) for v in sparse)
    return GroebnerBasis(order, elems, rank, n_vars, True, tuple(sparse))


@lru_cache(maxsize=512)
def _groebner_cached(gens, order):
    gens, rank, n_vars = _shape(gens)
    basis = _buchberger([g.to_sparse() for g in gens], order, rank)
    return _make_gb(_reduced(basis), order, rank, n_vars)


def groebner(gens, order=GREVLEX):
    """Reduced, monic Groebner basis of the submodule generated by ``gens``."""
    return _groebner_cached(tuple(gens), order)


def normal_form(e, gb):
    """Divide ``e`` by ``gb``: returns ``(remainder, quotients)`` with
    ``e == sum(q_i * gb_i) + remainder`` exactly."""
    if e.rank != gb.rank or e.n_vars != gb.n_vars:
        raise StructuralError("element shape does not match the basis")
    rem, quots = _reduce(e.to_sparse(), gb._basis(), track=True)
    remainder = FreeModuleElement.from_sparse(rem, gb.rank, gb.n_vars)
    quotients = [Polynomial(gb.n_vars, q) for q in quots]
    return remainder, quotients


def is_groebner(gb):
    """Buchberger criterion: every S-pair with a common leading position reduces to 0."""
    b = gb._basis()
    for j in range(len(b.elems)):
        for i in range(j):
            if b.leads[i][0] != b.leads[j][0]:
                continue
            s = _spoly(b.elems[i], b.leads[i], b.elems[j], b.leads[j])
            if _reduce(s, b)[0]:
                return False
    return True


# -- augmented computations: syzygies and certificates -----------------------


@lru_cache(maxsize=512)
def _augmented(gens, order):
    gens, rank, n_vars = _shape(gens)
    m = len(gens)
    unit = (0,) * n_vars
    aug = []
    for i, g in enumerate(gens):
        v = g.to_sparse()
        v[(rank + i, unit)] = Fraction(1)
        aug.append(v)
    basis = _buchberger(aug, order, rank + m)
    red = _reduced(basis)
    b = _Basis(order)
    for v in red:
        b.add(v)
    return b, rank, m, n_vars


def _split(v, rank, m, n_vars):
    top = {k: c for k, c in v.items() if k[0] < rank}
    bottom = {(p - rank, e): c for (p, e), c in v.items() if p >= rank}
    return top, FreeModuleElement.from_sparse(bottom, m, n_vars)


def combine(coeffs, gens):
    """``sum(c_i * g_i)`` for polynomial coefficients."""
    gens = list(gens)
    total = FreeModuleElement.zero(gens[0].rank, gens[0].n_vars)
    for c, g in zip(coeffs, gens):
        if not c.is_zero():
            total = total + g.scale(c)
    return total


def syzygies(gens, order=GREVLEX):
    """Generators of ``{f : sum f_i gens_i = 0}`` (each re-verified exactly)."""
    gens = tuple(gens)
    b, rank, m, n_vars = _augmented(gens, order)
    out = []
    for v, (pos, _, _) in zip(b.elems, b.leads):
        if pos < rank:
            continue
        top, s = _split(v, rank, m, n_vars)
        assert not top
        if not combine(s.components, gens).is_zero():
            raise AssertionError("syzygy failed exact re-verification")
        out.append(s)
    return out


@dataclass(frozen=True)
class Certificate:
    member: bool
    coefficients: Optional[tuple] = None
    remainder: Optional[FreeModuleElement] = None

    def __bool__(self):
        return self.member


def membership(e, gens, order=GREVLEX):
    """Decide ``e in <gens>``; members come with exactly re-verified coefficients."""
    gens = tuple(gens)
    if e.rank != gens[0].rank or e.n_vars != gens[0].n_vars:
        raise StructuralError("element shape does not match the generators")
    b, rank, m, n_vars = _augmented(gens, order)
    rem, _ = _reduce(e.to_sparse(), b)
    top, bottom = _split(rem, rank, m, n_vars)
    if top:
        remainder = FreeModuleElement.from_sparse(top, rank, n_vars)
        return Certificate(False, None, remainder)
    coeffs = tuple(-c for c in bottom.components)
    if combine(coeffs, gens) != e:
        raise AssertionError("membership certificate failed exact re-verification")
    return Certificate(True, coeffs, FreeModuleElement.zero(rank, n_vars))


def contains(gens, e, order=GREVLEX):
    """Membership without a certificate (plain normal form, cheaper)."""
    rem, _ = normal_form(e, groebner(gens, order))
    return rem.is_zero()


def module_equal(a, b, order=GREVLEX):
    a, b = tuple(a), tuple(b)
    ga, gb = groebner(a, order), groebner(b, order)
    if ga.rank != gb.rank or ga.n_vars != gb.n_vars:
        raise StructuralError("modules live in different free modules")
    if ga.elements == gb.elements:
        return True
    return all(normal_form(x, gb)[0].is_zero() for x in a) and all(
        normal_form(y, ga)[0].is_zero() for y in b
    )
