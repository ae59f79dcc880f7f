"""Numeric layer: flows, path-holonomy maps, holonomy transport, leaf tracing.

Everything here is float64. Integration is fixed-step RK4 so that runs are
reproducible bit for bit; random choices take an explicit seed.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import DivergenceError, PreconditionError, StructuralError, TransportError
from .exactalg import membership, module_equal
from .vfield import FloatField, VectorField, lie_bracket


@dataclass(frozen=True)
class FlowParams:
    step: float = 1e-3
    tol: float = 1e-6
    max_steps: int = 10_000_000

    def __post_init__(self):
        if not (self.step > 0 and self.tol > 0):
            raise StructuralError("step and tol must be positive")
        if self.max_steps < 1:
            raise StructuralError("max_steps must be positive")


DEFAULT = FlowParams()


class _Field:
    """Batched float evaluator of one polynomial vector field ``sum v_k X_k``."""

    def __init__(self, exps, coef):
        self.exps = exps  # (K, n) integer exponents
        self.coef = coef  # (n, K)

    @classmethod
    def of(cls, fields, v=None):
        ff = fields if isinstance(fields, FloatField) else FloatField(list(fields))
        coef = ff._coef  # (m, n, K)
        if v is None:
            if coef.shape[0] != 1:
                raise StructuralError("need coefficients to combine several fields")
            v = [1.0]
        v = np.asarray(v, dtype=float)
        if v.shape != (coef.shape[0],):
            raise StructuralError(f"need {coef.shape[0]} coefficients, got {v.shape}")
        return cls(ff._exps.astype(int), np.tensordot(v, coef, axes=1))

    def __call__(self, x):
        # x: (..., n)
        if not len(self.exps):
            return np.zeros_like(x)
        mons = np.prod(np.power(x[..., None, :], self.exps), axis=-1)
        return mons @ self.coef.T


def _as_field(X):
    if isinstance(X, _Field):
        return X
    if isinstance(X, VectorField):
        return _Field.of([X])
    raise TypeError(f"not a vector field: {X!r}")


def _integrate(f, x, t, n_steps, trajectory=False):
    x = np.array(x, dtype=float)
    h = t / n_steps if n_steps else 0.0
    path = [x.copy()] if trajectory else None
    # blowup is reported below as DivergenceError, not as numpy warnings
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(n_steps):
            k1 = f(x)
            k2 = f(x + 0.5 * h * k1)
            k3 = f(x + 0.5 * h * k2)
            k4 = f(x + h * k3)
            x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            if not np.all(np.isfinite(x)):
                raise DivergenceError("non-finite state during integration")
            if trajectory:
                path.append(x.copy())
    return (x, path) if trajectory else x


def _n_steps(t, step, p):
    n = int(math.ceil(abs(t) / step - 1e-12)) if t else 0
    if n > p.max_steps:
        raise PreconditionError(f"flow would need {n} steps (max_steps={p.max_steps})")
    return n


def flow(X, x0, t, p=DEFAULT):
    """Time-``t`` flow of ``X`` from ``x0`` (RK4, ``ceil(|t|/step)`` equal steps)."""
    x0 = np.asarray(x0, dtype=float)
    if not (np.all(np.isfinite(x0)) and math.isfinite(t)):
        raise StructuralError("flow needs finite inputs")
    f = _as_field(X)
    return _integrate(f, x0, t, _n_steps(t, p.step, p))


def combination_field(F, v):
    if len(v) != F.m:
        raise StructuralError(f"need {F.m} coefficients, got {len(v)}")
    return _Field.of(_float_fields(F), v)


def _float_fields(F):
    ff = getattr(F, "_float_fields", None)
    if ff is None:
        ff = FloatField(F.generators)
        F._float_fields = ff
    return ff


def exp_combination(F, v, x, p=DEFAULT):
    """Target map of the path-holonomy bisubmersion: time-1 flow of ``sum v_i X_i``."""
    if F.zero:
        return np.asarray(x, dtype=float)
    return flow(combination_field(F, v), x, 1.0, p)


def numeric_rank(mat, tol=1e-8):
    mat = np.atleast_2d(np.asarray(mat, dtype=float))
    if mat.size == 0:
        return 0
    s = np.linalg.svd(mat, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0])))


def tangent_rank(F, x, tol=1e-8):
    if F.zero:
        return 0
    return numeric_rank(_float_fields(F)(x), tol)


# -- bisubmersion points --------------------------------------------------


@dataclass
class BisubmersionPoint:
    foliation: object
    v: list
    x: list

    def __post_init__(self):
        if len(self.v) != self.foliation.m:
            raise StructuralError("need one flow coefficient per generator")


def _same_foliation(F, G):
    if F is G:
        return True
    if F.n != G.n:
        return False
    if F.zero or G.zero:
        return F.zero and G.zero
    return module_equal(F.generators, G.generators)


def bisubmersion_equiv(u1, u2, radius=0.1, n_samples=16, p=DEFAULT, seed=0):
    """Compare the carried diffeomorphisms ``y -> exp(sum v_i X_i)(y)`` near ``x``.

    A large deviation refutes equivalence; a small one is evidence only.
    """
    if not _same_foliation(u1.foliation, u2.foliation):
        raise PreconditionError("bisubmersion points over different foliations")
    x1, x2 = np.asarray(u1.x, float), np.asarray(u2.x, float)
    if np.max(np.abs(x1 - x2), initial=0.0) > p.tol:
        raise PreconditionError("bisubmersion points have different source points")
    rng = np.random.default_rng(seed)
    n = len(x1)
    samples = [x1]
    for _ in range(n_samples):
        d = rng.normal(size=n)
        d *= radius * rng.uniform() ** (1.0 / n) / max(np.linalg.norm(d), 1e-300)
        samples.append(x1 + d)
    dev = 0.0
    scale = 0.0
    for y in samples:
        a = exp_combination(u1.foliation, u1.v, y, p)
        b = exp_combination(u2.foliation, u2.v, y, p)
        dev = max(dev, float(np.max(np.abs(a - b))))
        scale = max(scale, float(np.max(np.abs(a))), float(np.max(np.abs(b))))
    return {"equivalent": dev < p.tol * (1.0 + scale), "max_deviation": dev}


# -- holonomy transport ------------------------------------------------------


@dataclass
class Transversal:
    """Float slice: ``point + D s`` with ``D`` of shape (n, q)."""

    point: np.ndarray
    directions: np.ndarray

    @classmethod
    def of(cls, spec):
        if isinstance(spec, Transversal):
            return spec
        point = np.array([float(c) for c in spec.base_point])
        dirs = np.array([[float(c) for c in d] for d in spec.directions]).T
        return cls(point, dirs.reshape(len(point), -1))

    @classmethod
    def from_arrays(cls, point, directions):
        point = np.asarray(point, float)
        return cls(point, np.asarray(directions, float).reshape(-1, len(point)).T)

    @property
    def q(self):
        return self.directions.shape[1]

    def embed(self, s):
        return self.point + self.directions @ np.asarray(s, float)

    def coords(self, z):
        return np.linalg.lstsq(self.directions, np.asarray(z, float) - self.point, rcond=None)[0]

    def normal_basis(self):
        """Rows spanning the annihilator of the directions."""
        u, s, _ = np.linalg.svd(self.directions, full_matrices=True)
        return u[:, self.q:].T

    def transformed(self, matrix, shift):
        """Preimage under ``z -> A z + b``."""
        a = np.asarray(matrix, float)
        ainv = np.linalg.inv(a)
        return Transversal(ainv @ (self.point - np.asarray(shift, float)), ainv @ self.directions)


@dataclass
class HolonomyResult:
    samples: list  # (offset_in, offset_out) pairs
    linearization: np.ndarray
    max_residual: float
    offset: Optional[np.ndarray] = None
    fit_residual: float = 0.0
    landing_residual: float = 0.0
    leaf_dim: int = 0

    def to_json(self):
        return {
            "samples": [[list(map(float, a)), list(map(float, b))] for a, b in self.samples],
            "linearization": self.linearization.tolist(),
            "max_residual": self.max_residual,
            "affine_offset": None if self.offset is None else self.offset.tolist(),
            "fit_residual": self.fit_residual,
            "landing_residual": self.landing_residual,
            "leaf_dim": self.leaf_dim,
        }


def _subdivide(path, max_len):
    pts = [np.asarray(path[0], float)]
    seg_of = []
    for k in range(len(path) - 1):
        a, b = np.asarray(path[k], float), np.asarray(path[k + 1], float)
        pieces = max(1, int(math.ceil(np.linalg.norm(b - a) / max_len)))
        for j in range(1, pieces + 1):
            pts.append(a + (b - a) * (j / pieces))
            seg_of.append(k)
    return pts, seg_of


def _batched_flow(f, zs, n_steps):
    return _integrate(f, zs, 1.0, n_steps)


def holonomy_map(F, path, S0, S1, offsets=None, p=DEFAULT, substep=0.05, rank_tol=1e-8):
    """Transport offsets on ``S0`` along ``path`` to ``S1``; fit a linear map.

    Each substep fits ``v`` with ``sum v_i X_i(a) ~ b - a`` at the path point and
    flows every offset point by that combination for time 1, so offsets only move
    along their own leaves. A final leafwise Newton step lands them on ``S1``.
    """
    if F.zero:
        raise PreconditionError("the zero foliation has no leaf directions to transport along")
    T0, T1 = Transversal.of(S0), Transversal.of(S1)
    path = [np.asarray(P, float) for P in path]
    if len(path) < 1:
        raise StructuralError("empty path")
    if np.linalg.norm(path[0] - T0.point) > 1e3 * p.tol * max(1.0, np.linalg.norm(T0.point)):
        raise PreconditionError("S0 is not based at the path start")
    if np.linalg.norm(path[-1] - T1.point) > 1e3 * p.tol * max(1.0, np.linalg.norm(T1.point)):
        raise PreconditionError("S1 is not based at the path end")
    ff = _float_fields(F)
    leaf = numeric_rank(ff(path[0]), rank_tol)
    n = F.n
    if T0.q != n - leaf or T1.q != n - leaf:
        raise PreconditionError(f"transversals must have dimension {n - leaf} (leaf codimension)")
    for T, label in ((T0, 0), (T1, len(path) - 1)):
        tr = numeric_rank(np.hstack([T.directions, ff(T.point).T]), rank_tol)
        if tr != n:
            raise TransportError("transversal is not transverse to the leaf", segment=label)
    if offsets is None:
        h = 1e-3
        offsets = [np.full(T0.q, c) * h for c in (-1.0, -0.5, 0.5, 1.0)] if T0.q == 1 else [
            h * e for e in np.vstack([np.eye(T0.q), -np.eye(T0.q)])
        ]
    offsets = [np.atleast_1d(np.asarray(o, float)) for o in offsets]
    zs = np.array([T0.embed(o) for o in offsets])
    pts, seg_of = _subdivide(path, substep)
    fit_res = 0.0
    for k in range(len(pts) - 1):
        a, b = pts[k], pts[k + 1]
        delta = b - a
        step_len = float(np.linalg.norm(delta))
        if step_len == 0.0:
            continue
        E = ff(a)  # (m, n)
        if numeric_rank(E, rank_tol) != leaf:
            raise TransportError("tangent rank changed along the path", segment=seg_of[k])
        v, *_ = np.linalg.lstsq(E.T, delta, rcond=None)
        res = float(np.linalg.norm(E.T @ v - delta))
        fit_res = max(fit_res, res)
        if res > 0.1 * step_len + p.tol:
            raise TransportError("path leaves the leaf (increment not tangent)", segment=seg_of[k])
        f = _Field.of(ff, v)
        zs = _batched_flow(f, zs, _n_steps(step_len, p.step, p) or 1)
        for z in zs:
            if numeric_rank(ff(z), rank_tol) != leaf:
                raise TransportError("offset point left the regular tube", segment=seg_of[k])
    outs, landing = [], 0.0
    for z in zs:
        z, r = _land(ff, z, T1, p, rank_tol)
        landing = max(landing, r)
        outs.append(T1.coords(z))
    ins = np.array(offsets)
    outs = np.array(outs)
    design = np.hstack([ins, np.ones((len(ins), 1))])
    coef, *_ = np.linalg.lstsq(design, outs, rcond=None)
    lin = coef[:-1].T
    shift = coef[-1]
    resid = float(np.max(np.abs(design @ coef - outs))) if len(ins) else 0.0
    return HolonomyResult(
        samples=list(zip(ins, outs)),
        linearization=lin,
        max_residual=resid,
        offset=shift,
        fit_residual=fit_res,
        landing_residual=landing,
        leaf_dim=leaf,
    )


def _land(ff, z, T, p, rank_tol, max_iter=50):
    """Move ``z`` inside its leaf until it sits on the transversal ``T``."""
    nrm = T.normal_basis()
    if nrm.shape[0] == 0:
        return z, 0.0
    r = nrm @ (z - T.point)
    for _ in range(max_iter):
        if np.max(np.abs(r)) < 1e-13 * max(1.0, np.max(np.abs(z))):
            break
        E = ff(z)
        c, *_ = np.linalg.lstsq((nrm @ E.T), -r, rcond=None)
        size = float(np.linalg.norm(E.T @ c))
        f = _Field.of(ff, c)
        z = _integrate(f, z, 1.0, _n_steps(size, p.step, p) or 1)
        r = nrm @ (z - T.point)
    return z, float(np.max(np.abs(r)))


# -- flow pushforward identity -------------------------------------------------


def expm(a):
    """Matrix exponential: scaling and squaring around the (6, 6) Pade approximant."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if n == 0:
        return a.copy()
    norm = np.linalg.norm(a, 1)
    s = max(0, int(math.ceil(math.log2(norm / 0.5)))) if norm > 0.5 else 0
    a = a / (2.0 ** s)
    c = [1.0]
    for k in range(1, 7):
        c.append(c[-1] * (6 - k + 1) / (k * (12 - k + 1)))
    ident = np.eye(n)
    powers = [ident, a]
    for _ in range(5):
        powers.append(powers[-1] @ a)
    num = sum(ck * pk for ck, pk in zip(c, powers))
    den = sum(((-1) ** k) * ck * pk for k, (ck, pk) in enumerate(zip(c, powers)))
    r = np.linalg.solve(den, num)
    for _ in range(s):
        r = r @ r
    return r


@dataclass
class FlowIdentityResult:
    lhs: np.ndarray
    rhs: np.ndarray
    max_residual: float
    gamma: list = field(default_factory=list)
    transport: Optional[np.ndarray] = None


def structure_functions(F, X):
    """``gamma[i][j]`` with ``[Y^i, X] = sum_j gamma[i][j] Y^j`` (exact)."""
    gamma = []
    for i, Y in enumerate(F.generators):
        cert = membership(lie_bracket(Y, X), F.generators)
        if not cert.member:
            raise PreconditionError(f"[Y^{i}, X] is not in the module; no structure functions")
        gamma.append(list(cert.coefficients))
    return gamma


def flow_pushforward_check(F, coeffs, x, p=DEFAULT, fd_step=1e-5):
    """Compare ``(phi^1)_* Y^i`` at ``x`` with the ordered exponential formula.

    ``phi`` is the flow of ``X = sum coeffs_i Y^i``. The left side uses a central
    finite-difference Jacobian of the numeric flow; the right side multiplies the
    evaluated generators by ``E_{K-1} ... E_0`` with ``E_k = exp(Gamma(t_k + dt/2) dt)``
    and ``Gamma_ij(t) = gamma^i_j(phi^{-t}(x))``.
    """
    if F.zero:
        raise PreconditionError("zero foliation has no generators")
    if not F.involutivity.involutive:
        raise PreconditionError("foliation is not involutive")
    coeffs = [Fraction(c) for c in coeffs]
    if len(coeffs) != F.m:
        raise StructuralError(f"need {F.m} coefficients")
    X = VectorField.zero(F.n)
    for c, Y in zip(coeffs, F.generators):
        if c:
            X = X + Y.scale(c)
    gamma = structure_functions(F, X)
    x = np.asarray([float(c) for c in x], float)
    ff = _float_fields(F)
    m, n = F.m, F.n
    if X.is_zero():
        ev = ff(x)
        return FlowIdentityResult(ev, ev.copy(), 0.0, gamma, np.eye(m))
    fx = _Field.of([X])
    z = flow(fx, x, -1.0, p)
    jac = np.zeros((n, n))
    for j in range(n):
        h = fd_step * max(1.0, abs(z[j]))
        e = np.zeros(n)
        e[j] = h
        jac[:, j] = (flow(fx, z + e, 1.0, p) - flow(fx, z - e, 1.0, p)) / (2 * h)
    lhs = ff(z) @ jac.T  # row i: J Y^i(z)
    steps = _n_steps(1.0, p.step, p)
    dt = 1.0 / steps
    # reverse-flow trajectory at half steps
    _, traj = _integrate(fx, x, -1.0, 2 * steps, trajectory=True)
    gfun = _gamma_evaluator(gamma, n)
    transport = np.eye(m)
    for k in range(steps):
        g = gfun(traj[2 * k + 1])
        transport = expm(g * dt) @ transport
    rhs = transport @ ff(x)
    scale = max(1.0, float(np.max(np.abs(rhs))))
    resid = float(np.max(np.abs(lhs - rhs))) / scale
    return FlowIdentityResult(lhs, rhs, resid, gamma, transport)


def _gamma_evaluator(gamma, n):
    m = len(gamma)
    polys = [(i, j, p) for i in range(m) for j in range(m) if not (p := gamma[i][j]).is_zero()]

    def at(x):
        g = np.zeros((m, m))
        for i, j, p in polys:
            g[i, j] = p.evaluate_float(x)
        return g

    return at


# -- leaf tracing --------------------------------------------------------


def leaf_trace(F, x0, n_moves=50, seed=0, p=DEFAULT, scale=0.3, rank_tol=1e-8):
    """Random orbit sample ``x_{k+1} = exp(sum v_i X_i)(x_k)`` with small seeded ``v``."""
    rng = np.random.default_rng(seed)
    x = np.asarray(x0, float)
    points = [x]
    if F.zero:
        return {"points": [x] * (n_moves + 1), "leaf_dim_estimate": 0}
    for _ in range(n_moves):
        v = scale * rng.normal(size=F.m)
        x = exp_combination(F, v, x, p)
        points.append(x)
    ranks = [tangent_rank(F, q, rank_tol) for q in points]
    return {"points": points, "leaf_dim_estimate": max(ranks), "ranks": ranks}
