"""Command line front end: ``singfol <command> ...``.

Results go to stdout as JSON (``"schema": 1``); diagnostics go to stderr.
Exit codes: 0 ok, 2 parse error, 3 precondition, 4 undetermined verdict,
5 numeric divergence.
"""

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from . import flownum, folcore, folops
from .dsl import format_field, parse_directions, parse_field, parse_point, parse_spec, spec_from_presentation
from .errors import ParseError, PreconditionError, SingfolError
from .exactalg import linalg
from .scenario import Scenario

SCHEMA = 1
EXIT_UNDETERMINED = 4


def corpus_dir():
    return Path(str(resources.files("singfol") / "corpus"))


def jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return obj


def _load(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise PreconditionError(f"cannot read {path}: {exc.strerror}") from None
    return parse_spec(text).presentation()


def _point(text, exact=True):
    coords, is_exact = parse_point(text)
    if exact and not is_exact:
        raise PreconditionError("this command needs an exact rational point")
    return coords


def _fields(F, fields):
    return [format_field(X, list(F.names)) for X in fields]


def _poly_strs(F, polys):
    return [p.to_str(list(F.names)) for p in polys]


def _emit_foliation(F, fmt):
    text = spec_from_presentation(F).to_text()
    if fmt == "fol":
        return text
    return {
        "foliation": {
            "name": F.name,
            "vars": list(F.names),
            "zero": F.zero,
            "generators": _fields(F, F.generators),
            **({k: v for k, v in F.meta.items() if not k.startswith("_")}),
        },
        "fol": text,
    }


# -- exact commands --------------------------------------------------------


def cmd_involutive(a):
    F = _load(a.spec)
    rep = folcore.check_involutive(F)
    certs = []
    for (i, j), c in sorted(rep.certificates.items()):
        certs.append({
            "pair": [i, j],
            "member": c.member,
            "coefficients": _poly_strs(F, c.coefficients) if c.member else None,
            "remainder": None if c.member else _fields(F, [c.remainder])[0],
        })
    return {
        "involutive": rep.involutive,
        "first_failure": list(rep.first_failure) if rep.first_failure else None,
        "certificates": certs,
    }, {"involutive": "exact"}


def cmd_tangent_dim(a):
    F = _load(a.spec)
    x = _point(a.point)
    return {"point": x, "tangent_dim": folcore.tangent_dim(F, x)}, {"tangent_dim": "exact"}


def cmd_fiber_dim(a):
    F = _load(a.spec)
    x = _point(a.point)
    return {
        "point": x,
        "fiber_dim": folcore.fiber_dim(F, x),
        "note": "algebraic fiber dimension of the polynomial module",
    }, {"fiber_dim": "exact"}


def _isotropy_json(F, alg):
    return {
        "dim": alg.dim,
        "basis": _fields(F, alg.basis),
        "basis_coefficients": alg.coefficients,
        "structure_constants": [[i, j, k, c] for i, j, k, c in alg.sparse_constants()],
        "abelian": alg.is_abelian(),
        "center_dim": alg.center_dim(),
        "derived_dim": alg.derived_dim(),
        "killing_form": alg.killing_form(),
        "killing_nondegenerate": alg.is_semisimple(),
    }


def cmd_isotropy(a):
    F = _load(a.spec)
    x = _point(a.point)
    return {"point": x, **_isotropy_json(F, folcore.isotropy_algebra(F, x))}, {"structure_constants": "exact"}


def _locus_json(F, L):
    return {
        "generic_tangent_rank": L.generic_tangent_rank,
        "tangent_drop_ideal": _poly_strs(F, L.tangent_drop_ideal),
        "tangent_drop_groebner": _poly_strs(F, L.tangent_drop_gb),
        "generic_fiber_dim": L.generic_fiber_dim,
        "fiber_jump_ideal": _poly_strs(F, L.fiber_jump_ideal),
        "fiber_jump_groebner": _poly_strs(F, L.fiber_jump_gb),
    }


def cmd_locus(a):
    F = _load(a.spec)
    return _locus_json(F, folcore.singular_locus(F, a.seed)), {"generic_tangent_rank": "exact (sampled rank)"}


def _verdict_json(v):
    return {"verdict": v.kind, "witness": v.witness, "reason": v.reason}


def cmd_verdicts(a):
    F = _load(a.spec)
    L = folcore.singular_locus(F, a.seed)
    reg = folcore.regularity_verdict(F, L, a.seed)
    proj = folcore.projectivity_verdict(F, L, a.seed)
    out = {"regularity": _verdict_json(reg), "projectivity": _verdict_json(proj)}
    if "undetermined" in (reg.kind, proj.kind):
        out["error"] = {"code": "undetermined", "message": "a verdict could not be decided"}
        return out, {"verdicts": "exact"}, EXIT_UNDETERMINED
    return out, {"verdicts": "exact"}


def cmd_report(a):
    F = _load(a.spec)
    x = _point(a.point)
    rep = folcore.morita_report(F, x)
    out = {
        "point": x,
        "leaf_dim": rep.leaf_dim,
        "codim": rep.codim,
        "fiber_dim": rep.fiber_dim,
        "fiber_dim_kind": "algebraic",
        "isotropy": _isotropy_json(F, rep.isotropy),
        "invariants": rep.invariants(),
    }
    if a.compare:
        G = _load(a.compare)
        y = _point(a.compare_point or a.point)
        other = folcore.morita_report(G, y)
        diff = rep.differs(other)
        out["comparison"] = {
            "other": a.compare,
            "other_invariants": other.invariants(),
            "differing": diff,
            "verdict": "not Morita equivalent" if diff else "invariants agree",
        }
    return out, {"report": "exact"}


# -- constructions ---------------------------------------------------------


def cmd_pullback(a):
    F = _load(a.spec)
    spec = folops.ProjectionSpec(F.n + a.fiber_vars, tuple(range(F.n)))
    return _emit_foliation(folops.pullback_projection(F, spec), a.format), {"generators": "exact"}


def cmd_product(a):
    F, G = _load(a.spec), _load(a.other)
    return _emit_foliation(folops.product(F, G), a.format), {"generators": "exact"}


def _drop_indices(F, text):
    names = [t for t in text.replace(",", " ").split() if t]
    idx = []
    for t in names:
        if t in F.names:
            idx.append(F.names.index(t))
        elif t.isdigit() and int(t) < F.n:
            idx.append(int(t))
        else:
            raise ParseError(f"unknown variable {t!r} in --drop")
    return idx


def cmd_push(a):
    F = _load(a.spec)
    spec = folops.ProjectionSpec.dropping(F.n, _drop_indices(F, a.drop))
    gens = None
    if a.gens:
        G = _load(a.gens)
        if G.n != F.n:
            raise PreconditionError("--gens file lives on a different chart")
        gens = list(G.generators)
    out = folops.pushforward(F, spec, gens, a.degree_cap)
    return _emit_foliation(out, a.format), {"generators": "exact"}


def cmd_slice(a):
    F = _load(a.spec)
    x = _point(a.point)
    dirs = parse_directions(a.directions)
    out = folops.restrict_to_slice(F, folops.SliceSpec(x, dirs), a.degree_cap)
    return _emit_foliation(out, a.format), {"generators": "exact", "degree_capped": "flag"}


# -- numeric commands -------------------------------------------------------


def _params(a):
    return flownum.FlowParams(step=a.step, tol=a.tol)


def cmd_leaf(a):
    F = _load(a.spec)
    x0 = [float(c) for c in _point(getattr(a, "from"), exact=False)]
    res = flownum.leaf_trace(F, x0, a.moves, a.seed, _params(a))
    return {
        "points": res["points"],
        "leaf_dim_estimate": res["leaf_dim_estimate"],
        "seed": a.seed,
    }, {"points": "float", "leaf_dim_estimate": "float (SVD rank)"}


def cmd_holonomy(a):
    report = Scenario.load(a.scenario).run()
    return report, {"linearization": "float"}


def _constant_coefficients(F, X):
    cols = [Y.to_sparse() for Y in F.generators]
    target = X.to_sparse()
    keys = sorted({k for c in cols for k in c} | set(target))
    rows = [[c.get(k, Fraction(0)) for c in cols] for k in keys]
    sol = linalg.solve(rows, [target.get(k, Fraction(0)) for k in keys])
    if sol is None:
        raise PreconditionError("--field is not a constant combination of the generators")
    return sol


def cmd_flow_identity(a):
    F = _load(a.spec)
    X = parse_field(a.field, list(F.names))
    coeffs = _constant_coefficients(F, X)
    x = [float(c) for c in _point(a.point, exact=False)]
    res = flownum.flow_pushforward_check(F, coeffs, x, _params(a))
    return {
        "coefficients": coeffs,
        "structure_functions": [_poly_strs(F, row) for row in res.gamma],
        "lhs": res.lhs,
        "rhs": res.rhs,
        "transport": res.transport,
        "max_residual": res.max_residual,
    }, {"lhs": "float", "rhs": "float", "structure_functions": "exact"}


# -- corpus ----------------------------------------------------------------


def corpus_entry(path):
    path = Path(path)
    try:
        if path.suffix == ".json":
            rep = Scenario.load(path).run()
            return {"file": path.name, "kind": "scenario", "passed": rep["passed"],
                    "linearizations": {r["name"]: r["linearization"] for r in rep["runs"]}}
        F = _load(path)
        origin = [Fraction(0)] * F.n
        inv = folcore.check_involutive(F)
        L = folcore.singular_locus(F)
        entry = {
            "file": path.name,
            "kind": "foliation",
            "name": F.name,
            "involutive": inv.involutive,
            "n_syzygies": len(F.syzygy_matrix),
            "generic_tangent_rank": L.generic_tangent_rank,
            "generic_fiber_dim": L.generic_fiber_dim,
            "regularity": folcore.regularity_verdict(F, L).kind,
            "projectivity": folcore.projectivity_verdict(F, L).kind,
            "tangent_dim_at_origin": folcore.tangent_dim(F, origin),
            "fiber_dim_at_origin": folcore.fiber_dim(F, origin),
        }
        if inv.involutive:
            entry["isotropy_dim_at_origin"] = folcore.isotropy_algebra(F, origin).dim
        return entry
    except SingfolError as exc:
        return {"file": path.name, "error": {"code": exc.code, "message": str(exc)}}


def cmd_corpus(a):
    root = Path(a.directory) if a.directory else corpus_dir()
    files = sorted(list(root.glob("*.fol")) + list(root.glob("*.json")))
    if a.jobs > 1:
        with ProcessPoolExecutor(max_workers=a.jobs) as pool:
            entries = list(pool.map(corpus_entry, files))
    else:
        entries = [corpus_entry(f) for f in files]
    return {"directory": str(root), "entries": entries}, {"entries": "mixed"}


# -- dispatch ----------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="singfol", description="Singular foliations from polynomial vector fields.")
    sub = p.add_subparsers(dest="command", required=True)

    def spec_cmd(name, func, help_):
        s = sub.add_parser(name, help=help_)
        s.add_argument("spec", help=".fol file")
        s.set_defaults(func=func)
        return s

    def numeric(s):
        s.add_argument("--step", type=float, default=1e-3)
        s.add_argument("--tol", type=float, default=1e-6)

    def emit(s):
        s.add_argument("--format", choices=("json", "fol"), default="json")

    spec_cmd("involutive", cmd_involutive, "certify involutivity")
    spec_cmd("tangent-dim", cmd_tangent_dim, "leaf dimension at a point").add_argument("--point", required=True)
    spec_cmd("fiber-dim", cmd_fiber_dim, "fiber dimension at a point").add_argument("--point", required=True)
    spec_cmd("isotropy", cmd_isotropy, "isotropy Lie algebra").add_argument("--point", required=True)
    spec_cmd("locus", cmd_locus, "singular loci").add_argument("--seed", type=int, default=0)
    spec_cmd("verdicts", cmd_verdicts, "regularity and projectivity").add_argument("--seed", type=int, default=0)
    s = spec_cmd("report", cmd_report, "Morita-invariant report")
    s.add_argument("--point", required=True)
    s.add_argument("--compare", help="second .fol file to compare against")
    s.add_argument("--compare-point")
    s = spec_cmd("pullback", cmd_pullback, "pull back along a projection adding fiber variables")
    s.add_argument("--fiber-vars", type=int, required=True)
    emit(s)
    s = spec_cmd("product", cmd_product, "product foliation")
    s.add_argument("other")
    emit(s)
    s = spec_cmd("push", cmd_push, "quotient foliation on the base")
    s.add_argument("--drop", required=True, help="fiber variables, comma separated")
    s.add_argument("--gens", help=".fol file with projectable generators")
    s.add_argument("--degree-cap", type=int)
    emit(s)
    s = spec_cmd("slice", cmd_slice, "restrict to an affine transversal slice")
    s.add_argument("--point", required=True)
    s.add_argument("--directions", required=True, help="e.g. '1,0;0,1'")
    s.add_argument("--degree-cap", type=int)
    emit(s)
    s = spec_cmd("leaf", cmd_leaf, "sample an orbit")
    s.add_argument("--from", required=True)
    s.add_argument("--moves", type=int, default=50)
    s.add_argument("--seed", type=int, default=0)
    numeric(s)
    s = sub.add_parser("holonomy", help="run a holonomy scenario")
    s.add_argument("--scenario", required=True)
    s.set_defaults(func=cmd_holonomy)
    s = spec_cmd("flow-identity", cmd_flow_identity, "check the flow pushforward formula")
    s.add_argument("--field", required=True)
    s.add_argument("--point", required=True)
    numeric(s)
    s = sub.add_parser("corpus", help="run every .fol and scenario in a directory")
    s.add_argument("directory", nargs="?")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_corpus)
    return p


def run_command(argv):
    """Returns ``(payload, exit_code)``; payload is a dict or ``.fol`` text."""
    args = build_parser().parse_args(argv)
    echo = {"schema": SCHEMA, "command": args.command}
    try:
        out = args.func(args)
    except SingfolError as exc:
        payload = {**echo, "error": {"code": exc.code, "message": str(exc)}, "exit_code": exc.exit_code}
        if isinstance(exc, ParseError) and exc.line is not None:
            payload["error"].update(line=exc.line, column=exc.column)
        return payload, exc.exit_code
    code = out[2] if len(out) == 3 else 0
    result, provenance = out[0], out[1]
    if isinstance(result, str):
        return result, code
    return {**echo, **jsonable(result), "provenance": provenance, "exit_code": code}, code


def main(argv=None):
    payload, code = run_command(sys.argv[1:] if argv is None else argv)
    if isinstance(payload, str):
        sys.stdout.write(payload)
    else:
        if "error" in payload:
            print(f"singfol: {payload['error']['message']}", file=sys.stderr)
        json.dump(payload, sys.stdout, indent=2)
        sys.stdout.write("\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
