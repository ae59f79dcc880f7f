"""Dense linear algebra over Fraction. Matrices are lists of row lists."""

from fractions import Fraction


def to_fractions(rows):
    return [[Fraction(v) for v in row] for row in rows]


def rref(rows, n_cols=None):
    """Reduced row echelon form. Returns ``(nonzero_rows, pivot_columns)``."""
    m = to_fractions(rows)
    if n_cols is None:
        n_cols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(n_cols):
        if r == len(m):
            break
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(rows):
    if not rows or not rows[0]:
        return 0
    return len(rref(rows)[1])


def nullspace(rows, n_cols=None):
    """Basis of ``{v : A v = 0}``, one vector per free column, in column order."""
    if n_cols is None:
        n_cols = len(rows[0]) if rows else 0
    if not rows:
        return [[Fraction(int(i == j)) for i in range(n_cols)] for j in range(n_cols)]
    red, pivots = rref(rows, n_cols)
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n_cols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def transpose(rows, n_cols=None):
    if not rows:
        return [[] for _ in range(n_cols or 0)]
    return [list(col) for col in zip(*rows)]


def matvec(a, v):
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def solve(a, b):
    """One exact solution of ``a x = b`` or ``None`` if inconsistent."""
    n = len(a[0]) if a else 0
    aug = [list(row) + [bi] for row, bi in zip(a, b)]
    red, pivots = rref(aug, n + 1)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for row, p in zip(red, pivots):
        x[p] = row[n]
    return x


def row_basis(rows, n_cols):
    """Echelon basis of the row space (the fixed convention used for quotients)."""
    if not rows:
        return []
    return rref(rows, n_cols)[0]


def in_span(basis, v):
    if not basis:
        return not any(v)
    return solve(transpose(basis), v) is not None


def det(rows):
    m = to_fractions(rows)
    n = len(m)
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            d = -d
        d *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] / m[c][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return d
