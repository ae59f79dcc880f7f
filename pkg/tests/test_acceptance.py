"""Acceptance criteria, one function each returning ``(ok, detail)``.

Run under pytest (one PASS/FAIL line per criterion is printed) or directly:
``python tests/test_acceptance.py``.
"""

import math
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import CORPUS, corpus_foliations, fol, load, random_field, random_poly  # noqa: E402
from oracles import brute_force_relations, matrix_structure_constants  # noqa: E402
from singfol.exactalg import combine, membership, module_equal, syzygies  # noqa: E402
from singfol.flownum import FlowParams, flow_pushforward_check  # noqa: E402
from singfol.folcore import (  # noqa: E402
    fiber_dim,
    isotropy_algebra,
    morita_report,
    projectivity_verdict,
    regularity_verdict,
    tangent_dim,
)
from singfol.folops import ProjectionSpec, pullback_projection, pushforward  # noqa: E402
from singfol.scenario import Scenario  # noqa: E402
from singfol.vfield import lie_bracket  # noqa: E402

ORIGIN = [0, 0]


def crit_fiber_dims():
    f0 = fiber_dim(load("F0.fol"), ORIGIN)
    f1 = fiber_dim(load("F1.fol"), ORIGIN)
    return (f0, f1) == (2, 4), f"F0: {f0}, F1: {f1}"


def crit_isotropy():
    gl = isotropy_algebra(load("gl2.fol"), ORIGIN)
    sl = isotropy_algebra(load("sl2.fol"), ORIGIN)
    problems = []
    for alg in (gl, sl):
        oracle = matrix_structure_constants(alg.basis)
        bad = [k for k, v in oracle.items() if alg.structure_constants[k[0]][k[1]] != v]
        if bad:
            problems.append(f"structure constants differ from matrix commutators at {bad[:3]}")
    if gl.dim != 4 or gl.is_abelian() or gl.center_dim() != 1:
        problems.append(f"gl2: dim {gl.dim}, center {gl.center_dim()}")
    if sl.dim != 3 or not sl.is_semisimple():
        problems.append(f"sl2: dim {sl.dim}, killing rank {sl.killing_rank()}")
    diff = morita_report(load("gl2.fol"), ORIGIN).differs(morita_report(load("sl2.fol"), ORIGIN))
    if not diff:
        problems.append("Morita reports agree")
    detail = f"gl2 dim {gl.dim} center {gl.center_dim()}; sl2 dim {sl.dim} killing rank {sl.killing_rank()}; differ in {diff}"
    return not problems, "; ".join(problems) or detail


def crit_projective_not_regular():
    rng = random.Random(5)
    samples = [[0]] + [[Fraction(rng.randint(-9, 9), rng.randint(1, 4))] for _ in range(20)]
    details = []
    ok = True
    for k in (1, 2, 3):
        F = load(f"x{k}.fol")
        start = time.perf_counter()
        dims = {fiber_dim(F, p) for p in samples}
        proj = projectivity_verdict(F)
        reg = regularity_verdict(F)
        elapsed = time.perf_counter() - start
        good = (dims == {1} and proj.kind == "projective" and reg.kind == "not_regular"
                and reg.witness == [0] and tangent_dim(F, [0]) == 0 and elapsed < 1.0)
        ok &= good
        details.append(f"k={k}: fiber dims {sorted(dims)}, {proj.kind}, {reg.kind} at {[str(c) for c in (reg.witness or [])]} ({elapsed:.2f}s)")
    return ok, "; ".join(details)


def crit_quotient():
    F = load("cylinder_big.fol")
    spec = ProjectionSpec.dropping(2, [0])
    out = pushforward(F, spec)
    target = fol("vars y\ngenerator y*dy")
    same = module_equal(list(out.generators), list(target.generators))
    back = pullback_projection(out, spec)
    round_trip = module_equal(list(back.generators), list(F.generators))
    return same and round_trip, f"push = <{', '.join(g.to_str(list(out.names)) for g in out.generators)}>, pullback equal: {round_trip}"


def crit_flow_identity():
    F = fol("vars x\ngenerator dx\ngenerator x*dx")
    res = flow_pushforward_check(F, [0, 1], [0.5], FlowParams(step=1e-3))
    factor = res.lhs[0, 0]
    err = abs(factor - math.e)
    err_rhs = abs(res.transport[0, 0] - math.e)
    ok = res.max_residual < 1e-4 and err < 1e-5 and err_rhs < 1e-5
    return ok, f"residual {res.max_residual:.2e}; |lhs - e| {err:.2e}; |transport - e| {err_rhs:.2e}"


def _scenario(name):
    return Scenario.load(CORPUS / name).run()


def crit_cylinder():
    rep = _scenario("cylinder.json")
    once = next(r for r in rep["runs"] if r["name"] == "once")
    lin = once["linearization"][0][0]
    rel = abs(lin - math.exp(2 * math.pi)) / math.exp(2 * math.pi)
    return rel < 1e-3, f"linearization {lin:.4f} vs e^(2 pi) {math.exp(2 * math.pi):.4f}, rel err {rel:.2e}"


def crit_mobius():
    rep = _scenario("mobius.json")
    lin = {r["name"]: r["linearization"][0][0] for r in rep["runs"]}
    ok = abs(lin["once"] + 1) < 1e-3 and abs(lin["twice"] - 1) < 1e-3
    return ok, f"once {lin['once']:.6f}, twice {lin['twice']:.6f}"


def crit_properties():
    problems = []
    rng = random.Random(2024)
    # Jacobi and Leibniz on 100 random degree <= 2 fields
    for _ in range(100):
        n = rng.randint(1, 3)
        X, Y, Z = (random_field(rng, n, 2) for _ in range(3))
        f = random_poly(rng, n, 2)
        jac = (lie_bracket(X, lie_bracket(Y, Z)) + lie_bracket(Y, lie_bracket(Z, X))
               + lie_bracket(Z, lie_bracket(X, Y)))
        if not jac.is_zero():
            problems.append("Jacobi")
            break
        if lie_bracket(X, Y.scale(f)) != Y.scale(X.apply(f)) + lie_bracket(X, Y).scale(f):
            problems.append("Leibniz")
            break
    # syzygy soundness on the corpus
    for name in corpus_foliations():
        F = load(name)
        if any(not combine(s.components, F.generators).is_zero() for s in F.syzygy_matrix):
            problems.append(f"unsound syzygy in {name}")
    # fiber_dim independent of the generating set
    alternatives = [
        ("F1.fol", "vars x y\ngenerator x*dx + y*dx\ngenerator y*dy\ngenerator y*dx\ngenerator x*dy - x*dx\ngenerator x*dx"),
        ("F0.fol", "vars x y\ngenerator x*dx + y*dy + y*dx - x*dy\ngenerator y*dx - x*dy"),
        ("split.fol", "vars x y\ngenerator x*dx + x*dy\ngenerator dy\ngenerator x^2*dx"),
    ]
    points = [[0, 0], [1, 0], [0, 1], [Fraction(-1, 2), 3], [2, 2]]
    for name, text in alternatives:
        F, G = load(name), fol(text)
        if not module_equal(F.generators, G.generators):
            problems.append(f"alternative for {name} generates a different module")
        if any(fiber_dim(F, p) != fiber_dim(G, p) for p in points):
            problems.append(f"fiber_dim depends on presentation for {name}")
    # holonomy homotopy invariance on two cylinder paths
    rep = _scenario("cylinder.json")
    same = next(c for c in rep["checks"] if c["kind"] == "same")
    if same["relative_error"] >= 1e-3:
        problems.append(f"cylinder paths disagree: {same['relative_error']:.2e}")
    # syzygy completeness against a degree-bounded brute-force search
    for name in corpus_foliations():
        F = load(name)
        if F.zero or F.n > 3:
            continue
        syz = syzygies(F.generators)
        for r in brute_force_relations(list(F.generators), 2):
            if not syz or not membership(r, syz).member:
                problems.append(f"relation missed in {name}")
                break
    return not problems, "; ".join(problems) or (
        f"100 fields, {len(corpus_foliations())} corpus syzygy sets, 3 alternatives, "
        f"cylinder paths rel err {same['relative_error']:.1e}"
    )


CRITERIA = [
    (1, "fiber dimensions at the origin", crit_fiber_dims, 1.0),
    (2, "isotropy Lie algebras gl(2) vs sl(2)", crit_isotropy, 5.0),
    (3, "x^k d/dx projective, not regular", crit_projective_not_regular, 3.0),
    (4, "quotient of <d_th, y d_y>", crit_quotient, 1.0),
    (5, "flow pushforward identity", crit_flow_identity, 2.0),
    (6, "cylinder holonomy", crit_cylinder, 10.0),
    (7, "Moebius holonomy", crit_mobius, 10.0),
    (8, "property suites", crit_properties, 120.0),
]


def run_criterion(number, label, func, budget):
    start = time.perf_counter()
    ok, detail = func()
    elapsed = time.perf_counter() - start
    if elapsed >= budget:
        ok = False
        detail += f"; over budget ({elapsed:.2f}s >= {budget}s)"
    line = f"{'PASS' if ok else 'FAIL'} criterion {number} ({label}) [{elapsed:.2f}s]: {detail}"
    return ok, line


@pytest.mark.parametrize("number,label,func,budget", CRITERIA, ids=[f"criterion{c[0]}" for c in CRITERIA])
def test_criterion(number, label, func, budget, capsys):
    ok, line = run_criterion(number, label, func, budget)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [run_criterion(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
