"""Polynomial vector fields on R^n and polynomial maps between charts."""

from fractions import Fraction

import numpy as np

from .errors import StructuralError, UnsupportedMapError
from .exactalg.polynomial import FreeModuleElement, Polynomial, as_fraction


class VectorField(FreeModuleElement):
    """``components[i]`` is the coefficient of the i-th coordinate derivative."""

    __slots__ = ()

    def __init__(self, components, n_vars=None):
        super().__init__(components, n_vars)
        if self.rank != self.n_vars:
            raise StructuralError(
                f"vector field needs {self.n_vars} components, got {self.rank}"
            )

    @classmethod
    def from_module_element(cls, e):
        return cls(e.components, e.n_vars)

    @classmethod
    def coordinate(cls, n, i):
        """The constant field along coordinate ``i``."""
        return cls(FreeModuleElement.unit(n, i, n).components, n)

    @classmethod
    def zero(cls, n):
        return cls([Polynomial.zero(n)] * n, n)

    @property
    def n(self):
        return self.n_vars

    def _rebuild(self, comps):
        return VectorField(comps, self.n_vars)

    def apply(self, f):
        """Directional derivative ``X(f)``."""
        out = Polynomial.zero(self.n_vars)
        for i, c in enumerate(self.components):
            if not c.is_zero():
                out = out + c * f.derivative(i)
        return out

    def to_str(self, names=None):
        from .dsl import format_field

        return format_field(self, names)

    def __str__(self):
        return self.to_str()


def evaluate(X, x):
    """Exact tangent vector of ``X`` at a rational point."""
    if len(x) != X.n:
        raise StructuralError(f"point has {len(x)} coordinates, chart has {X.n}")
    return X.evaluate(x)


def evaluate_float(X, x):
    return X.evaluate_float(x)


def lie_bracket(X, Y):
    """``[X, Y]^i = X(Y^i) - Y(X^i)``."""
    if X.n != Y.n:
        raise StructuralError("vector fields live on different charts")
    return VectorField([X.apply(b) - Y.apply(a) for a, b in zip(X.components, Y.components)], X.n)


class PolyMap:
    """A polynomial map R^source_dim -> R^target_dim, optionally with a verified inverse."""

    def __init__(self, components, source_dim=None, inverse=None, _verify=True):
        comps = tuple(components)
        if source_dim is None:
            if not comps:
                raise StructuralError("empty map needs an explicit source_dim")
            source_dim = comps[0].n_vars
        for c in comps:
            if c.n_vars != source_dim:
                raise StructuralError("map components disagree on source dimension")
        self.components = comps
        self.source_dim = source_dim
        self.target_dim = len(comps)
        self.inverse = None
        if inverse is not None:
            if not isinstance(inverse, PolyMap):
                inverse = PolyMap(inverse, self.target_dim, _verify=False)
            if inverse.source_dim != self.target_dim or inverse.target_dim != self.source_dim:
                raise StructuralError("inverse has the wrong shape")
            if _verify:
                if not (self.compose(inverse).is_identity() and inverse.compose(self).is_identity()):
                    raise UnsupportedMapError("supplied inverse does not invert the map")
            self.inverse = inverse
            if inverse.inverse is None:
                inverse.inverse = self

    @classmethod
    def identity(cls, n):
        comps = [Polynomial.var(n, i) for i in range(n)]
        ident = cls(comps, n, _verify=False)
        ident.inverse = ident
        return ident

    @classmethod
    def affine(cls, matrix, shift=None, inverse=True):
        """``x -> A x + b``; the inverse is computed exactly when ``A`` is square."""
        a = [[as_fraction(v) for v in row] for row in matrix]
        rows, cols = len(a), len(a[0])
        b = [as_fraction(v) for v in (shift or [0] * rows)]
        comps = []
        for i in range(rows):
            p = Polynomial.constant(cols, b[i])
            for j in range(cols):
                if a[i][j]:
                    p = p + Polynomial.var(cols, j) * a[i][j]
            comps.append(p)
        if not inverse or rows != cols:
            return cls(comps, cols)
        ainv = _inverse_matrix(a)
        if ainv is None:
            return cls(comps, cols)
        binv = [-sum((ainv[i][j] * b[j] for j in range(rows)), Fraction(0)) for i in range(rows)]
        inv = cls.affine(ainv, binv, inverse=False)
        return cls(comps, cols, inverse=inv)

    def __call__(self, x):
        return [c.evaluate(x) for c in self.components]

    def evaluate_float(self, x):
        return [c.evaluate_float(x) for c in self.components]

    def compose(self, inner):
        """``self ∘ inner``."""
        if inner.target_dim != self.source_dim:
            raise StructuralError("cannot compose: dimension mismatch")
        return PolyMap([c.substitute(inner.components) for c in self.components], inner.source_dim, _verify=False)

    def is_identity(self):
        return self.source_dim == self.target_dim and all(
            c == Polynomial.var(self.source_dim, i) for i, c in enumerate(self.components)
        )

    def jacobian(self):
        """Symbolic Jacobian: ``J[i][j] = d(component i)/d(x_j)``."""
        return [[c.derivative(j) for j in range(self.source_dim)] for c in self.components]

    def __repr__(self):
        return f"PolyMap({[str(c) for c in self.components]})"


def _inverse_matrix(a):
    from .exactalg.linalg import rref

    n = len(a)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    red, pivots = rref(aug, 2 * n)
    if pivots[:n] != list(range(n)):
        return None
    return [row[n:] for row in red]


def jacobian_matrix(phi, x):
    """Exact Jacobian of ``phi`` at the rational point ``x``."""
    if len(x) != phi.source_dim:
        raise StructuralError("point dimension does not match the map source")
    return [[d.evaluate(x) for d in row] for row in phi.jacobian()]


def conjugate(X, phi):
    """Pushforward ``phi_* X``: ``(phi_* X)(y) = Dphi(phi^-1 y) X(phi^-1 y)``."""
    if phi.inverse is None:
        raise UnsupportedMapError("conjugation needs a map with a verified inverse")
    if phi.source_dim != X.n or phi.target_dim != X.n:
        raise StructuralError("map and vector field live on different charts")
    jac = phi.jacobian()
    pushed = []
    for row in jac:
        acc = Polynomial.zero(X.n)
        for d, c in zip(row, X.components):
            if not d.is_zero() and not c.is_zero():
                acc = acc + d * c
        pushed.append(acc.substitute(phi.inverse.components))
    return VectorField(pushed, X.n)


class FloatField:
    """Compiled float evaluator for a list of polynomial vector fields.

    ``__call__(x)`` returns an ``(m, n)`` array whose row k is field k at x.
    """

    def __init__(self, fields):
        fields = list(fields)
        self.m = len(fields)
        self.n = fields[0].n if fields else 0
        exps = sorted({e for X in fields for p in X.components for e, _ in p.items()})
        self._exps = np.array(exps, dtype=float).reshape(len(exps), self.n)
        index = {e: k for k, e in enumerate(exps)}
        coef = np.zeros((self.m, self.n, len(exps)))
        for a, X in enumerate(fields):
            for i, p in enumerate(X.components):
                for e, c in p.items():
                    coef[a, i, index[e]] = float(c)
        self._coef = coef
        self._max_exp = int(self._exps.max()) if len(exps) else 0

    def monomials(self, x):
        x = np.asarray(x, dtype=float)
        if not len(self._exps):
            return np.zeros(0)
        return np.prod(np.power(x[None, :], self._exps), axis=1)

    def __call__(self, x):
        return self._coef @ self.monomials(x)

    def combination(self, v, x):
        """Value of ``sum_k v_k X_k`` at ``x``."""
        return np.asarray(v, dtype=float) @ self(x)
