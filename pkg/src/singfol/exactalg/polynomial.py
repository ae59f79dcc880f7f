"""Sparse multivariate polynomials over the rationals and free-module vectors of them.

A polynomial is a map from exponent tuples to nonzero ``Fraction`` coefficients.
Values are immutable once built; all arithmetic returns new objects.
"""

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from ..errors import StructuralError


def as_fraction(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"cannot use {type(c).__name__} as an exact coefficient")


def grevlex_key(exp):
    return (sum(exp), tuple(-e for e in reversed(exp)))


def lex_key(exp):
    return tuple(exp)


@dataclass(frozen=True)
class MonomialOrder:
    """Term order plus the rule extending it to free-module monomials.

    ``kind`` is ``"grevlex"`` or ``"lex"``; ``module_extension`` is ``"pot"``
    (position over term) or ``"top"`` (term over position). Lower position
    indices are larger.
    """

    kind: str = "grevlex"
    module_extension: str = "pot"

    def __post_init__(self):
        if self.kind not in ("grevlex", "lex"):
            raise ValueError(f"unknown monomial order {self.kind!r}")
        if self.module_extension not in ("pot", "top"):
            raise ValueError(f"unknown module extension {self.module_extension!r}")

    def term_key(self, exp):
        return grevlex_key(exp) if self.kind == "grevlex" else lex_key(exp)

    def module_key(self, mon):
        pos, exp = mon
        if self.module_extension == "pot":
            return (-pos, self.term_key(exp))
        return (self.term_key(exp), -pos)


GREVLEX = MonomialOrder("grevlex", "pot")
LEX = MonomialOrder("lex", "pot")


def _check_vars(a, b):
    if a.n_vars != b.n_vars:
        raise StructuralError(f"variable count mismatch: {a.n_vars} vs {b.n_vars}")


class Polynomial:
    __slots__ = ("n_vars", "_terms", "_hash")

    def __init__(self, n_vars, terms=None):
        if n_vars < 0:
            raise StructuralError("n_vars must be non-negative")
        self.n_vars = n_vars
        clean = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != n_vars or any(e < 0 for e in exp):
                raise StructuralError(f"bad exponent {exp} for {n_vars} variables")
            c = as_fraction(c)
            if c:
                clean[exp] = clean.get(exp, 0) + c
                if not clean[exp]:
                    del clean[exp]
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, n_vars, terms):
        # trusted constructor: terms already clean
        p = cls.__new__(cls)
        p.n_vars = n_vars
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, n_vars):
        return cls._raw(n_vars, {})

    @classmethod
    def constant(cls, n_vars, c):
        c = as_fraction(c)
        return cls._raw(n_vars, {(0,) * n_vars: c} if c else {})

    @classmethod
    def var(cls, n_vars, i):
        if not 0 <= i < n_vars:
            raise StructuralError(f"variable index {i} out of range")
        exp = [0] * n_vars
        exp[i] = 1
        return cls._raw(n_vars, {tuple(exp): Fraction(1)})

    @classmethod
    def monomial(cls, exp, c=1):
        return cls(len(exp), {tuple(exp): c})

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, exp):
        return self._terms.get(tuple(exp), Fraction(0))

    def is_zero(self):
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def is_constant(self):
        return all(not any(e) for e in self._terms)

    def constant_value(self):
        return self._terms.get((0,) * self.n_vars, Fraction(0))

    def degree(self):
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def depends_on(self, i):
        return any(e[i] for e in self._terms)

    def __len__(self):
        return len(self._terms)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            _check_vars(self, other)
            return other
        return Polynomial.constant(self.n_vars, other)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for exp, c in other._terms.items():
            s = out.get(exp, 0) + c
            if s:
                out[exp] = s
            else:
                out.pop(exp, None)
        return Polynomial._raw(self.n_vars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.n_vars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            try:
                c = as_fraction(other)
            except TypeError:
                return NotImplemented
            if not c:
                return Polynomial.zero(self.n_vars)
            return Polynomial._raw(self.n_vars, {e: v * c for e, v in self._terms.items()})
        _check_vars(self, other)
        out = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Polynomial._raw(self.n_vars, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = as_fraction(other)
        if not c:
            raise ZeroDivisionError("polynomial division by zero")
        return self * (1 / c)

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Polynomial.constant(self.n_vars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def mul_term(self, exp, c):
        """Multiply by the single term ``c * x^exp``."""
        return Polynomial._raw(
            self.n_vars,
            {tuple(a + b for a, b in zip(e, exp)): v * c for e, v in self._terms.items()},
        )

    def derivative(self, i):
        if not 0 <= i < self.n_vars:
            raise StructuralError(f"cannot differentiate in variable {i} of {self.n_vars}")
        out = {}
        for exp, c in self._terms.items():
            k = exp[i]
            if k:
                e = list(exp)
                e[i] = k - 1
                out[tuple(e)] = c * k
        return Polynomial._raw(self.n_vars, out)

    # -- evaluation and substitution ----------------------------------------

    def __call__(self, point):
        return self.evaluate(point)

    def evaluate(self, point):
        """Exact value at a point of rationals (ints and Fractions accepted)."""
        if len(point) != self.n_vars:
            raise StructuralError(f"point has {len(point)} coordinates, expected {self.n_vars}")
        pt = [as_fraction(v) for v in point]
        total = Fraction(0)
        for exp, c in self._terms.items():
            term = c
            for v, e in zip(pt, exp):
                if e:
                    term *= v**e
            total += term
        return total

    def evaluate_float(self, point):
        total = 0.0
        for exp, c in self._terms.items():
            term = float(c)
            for v, e in zip(point, exp):
                if e:
                    term *= v**e
            total += term
        return total

    def substitute(self, images):
        """Compose with a polynomial map: replace variable i by ``images[i]``.

        All images must share one variable count, which becomes the result's.
        """
        if len(images) != self.n_vars:
            raise StructuralError(f"need {self.n_vars} images, got {len(images)}")
        if not images:
            return self
        n_out = images[0].n_vars
        for q in images:
            if q.n_vars != n_out:
                raise StructuralError("substitution images disagree on variable count")
        powers = [{0: Polynomial.constant(n_out, 1)} for _ in images]

        def power(i, k):
            cache = powers[i]
            if k not in cache:
                cache[k] = power(i, k - 1) * images[i]
            return cache[k]

        result = Polynomial.zero(n_out)
        for exp, c in self._terms.items():
            term = Polynomial.constant(n_out, c)
            for i, k in enumerate(exp):
                if k:
                    term = term * power(i, k)
            result = result + term
        return result

    def embed(self, n_vars, positions):
        """Rename variable i to variable ``positions[i]`` in a ring of ``n_vars`` variables."""
        if len(positions) != self.n_vars:
            raise StructuralError("positions must cover every variable")
        out = {}
        for exp, c in self._terms.items():
            e = [0] * n_vars
            for i, k in enumerate(exp):
                e[positions[i]] += k
            out[tuple(e)] = c
        return Polynomial._raw(n_vars, out)

    # -- ordering helpers ----------------------------------------------------

    def sorted_terms(self, order=GREVLEX):
        return sorted(self._terms.items(), key=lambda t: order.term_key(t[0]), reverse=True)

    def leading_term(self, order=GREVLEX):
        if not self._terms:
            return None
        exp = max(self._terms, key=order.term_key)
        return exp, self._terms[exp]

    # -- comparison and printing ---------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.n_vars == other.n_vars and self._terms == other._terms
        try:
            return self._terms == Polynomial.constant(self.n_vars, other)._terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n_vars, frozenset(self._terms.items())))
        return self._hash

    def to_str(self, names=None):
        names = names or default_names(self.n_vars)
        if not self._terms:
            return "0"
        pieces = []
        for exp, c in self.sorted_terms():
            mono = "*".join(
                names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(exp) if k
            )
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            pieces.append((c < 0, body))
        neg, body = pieces[0]
        out = ("-" if neg else "") + body
        for neg, body in pieces[1:]:
            out += (" - " if neg else " + ") + body
        return out

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"Polynomial({self.to_str()!r}, n_vars={self.n_vars})"


def default_names(n):
    if n <= 3:
        return ["x", "y", "z"][:n]
    return [f"x{i}" for i in range(n)]


class FreeModuleElement:
    """A vector of polynomials in a shared ring; component i sits at position i."""

    __slots__ = ("components", "n_vars", "_hash")

    def __init__(self, components, n_vars=None):
        comps = tuple(components)
        if n_vars is None:
            if not comps:
                raise StructuralError("empty module element needs an explicit n_vars")
            n_vars = comps[0].n_vars
        for p in comps:
            if not isinstance(p, Polynomial):
                raise TypeError("module components must be Polynomials")
            if p.n_vars != n_vars:
                raise StructuralError("module components disagree on variable count")
        self.components = comps
        self.n_vars = n_vars
        self._hash = None

    @classmethod
    def zero(cls, rank, n_vars):
        return cls([Polynomial.zero(n_vars)] * rank, n_vars)

    @classmethod
    def unit(cls, rank, i, n_vars):
        comps = [Polynomial.zero(n_vars)] * rank
        comps[i] = Polynomial.constant(n_vars, 1)
        return cls(comps, n_vars)

    @property
    def rank(self):
        return len(self.components)

    def __len__(self):
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def is_zero(self):
        return all(p.is_zero() for p in self.components)

    def _check(self, other):
        if not isinstance(other, FreeModuleElement):
            raise TypeError("expected a FreeModuleElement")
        if other.rank != self.rank or other.n_vars != self.n_vars:
            raise StructuralError(
                f"module shape mismatch: rank {self.rank}/{other.rank}, vars {self.n_vars}/{other.n_vars}"
            )

    def _rebuild(self, comps):
        # subclasses override to keep their own type under arithmetic
        return FreeModuleElement(comps, self.n_vars)

    def __add__(self, other):
        self._check(other)
        return self._rebuild([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other):
        self._check(other)
        return self._rebuild([a - b for a, b in zip(self.components, other.components)])

    def __neg__(self):
        return self._rebuild([-a for a in self.components])

    def scale(self, f):
        """Multiply every component by a polynomial or a rational scalar."""
        return self._rebuild([f * a for a in self.components])

    def __mul__(self, f):
        if isinstance(f, FreeModuleElement):
            return NotImplemented
        return self.scale(f)

    __rmul__ = __mul__

    def evaluate(self, point):
        return [p.evaluate(point) for p in self.components]

    def evaluate_float(self, point):
        return [p.evaluate_float(point) for p in self.components]

    def substitute(self, images):
        return FreeModuleElement([p.substitute(images) for p in self.components], images[0].n_vars if images else self.n_vars)

    def degree(self):
        return max((p.degree() for p in self.components), default=-1)

    def to_sparse(self):
        """Flat ``{(position, exponent): coefficient}`` form used by the Groebner engine."""
        out = {}
        for pos, p in enumerate(self.components):
            for exp, c in p.items():
                out[(pos, exp)] = c
        return out

    @classmethod
    def from_sparse(cls, sparse, rank, n_vars):
        buckets = [{} for _ in range(rank)]
        for (pos, exp), c in sparse.items():
            buckets[pos][exp] = c
        return cls([Polynomial._raw(n_vars, b) for b in buckets], n_vars)

    def __eq__(self, other):
        if not isinstance(other, FreeModuleElement):
            return NotImplemented
        return self.n_vars == other.n_vars and self.components == other.components

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n_vars, self.components))
        return self._hash

    def to_str(self, names=None):
        return "(" + ", ".join(p.to_str(names) for p in self.components) + ")"

    def __repr__(self):
        return f"{type(self).__name__}{self.to_str()}"
