"""Holonomy scenarios: a foliation on an unwrapped chart, paths, and an
affine chart transition ``z -> A z + b`` for the identification.

The core only sees R^n charts. A loop on a quotient (cylinder, Moebius band)
is an open path in the unwrapped chart; its end transversal is the preimage of
the start transversal under the transition applied ``wraps`` times.

Numbers in scenario files may be JSON numbers or small expressions over
``pi``, ``e``, ``+ - * / **`` and ``exp``/``sqrt``/``log``.
"""

import ast
import json
import math
import operator
from pathlib import Path

import numpy as np

from .dsl import parse_spec
from .errors import ParseError, StructuralError
from .flownum import FlowParams, Transversal, holonomy_map

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_FUNCS = {"exp": math.exp, "sqrt": math.sqrt, "log": math.log}
_CONSTS = {"pi": math.pi, "e": math.e}


def number(value):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if not isinstance(value, str):
        raise ParseError(f"expected a number, got {value!r}")
    try:
        return float(_eval(ast.parse(value, mode="eval").body))
    except (SyntaxError, KeyError, TypeError, ZeroDivisionError) as exc:
        raise ParseError(f"bad numeric expression {value!r}: {exc}") from None


def _eval(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return node.value
    if isinstance(node, ast.Name):
        return _CONSTS[node.id]
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval(node.left), _eval(node.right))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and len(node.args) == 1:
        return _FUNCS[node.func.id](_eval(node.args[0]))
    raise TypeError(f"unsupported syntax {ast.dump(node)}")


def _vector(values):
    return np.array([number(v) for v in values])


def _matrix(rows):
    return np.array([[number(v) for v in row] for row in rows])


def _transversal(obj):
    return Transversal.from_arrays(_vector(obj["point"]), _matrix(obj["directions"]))


def load_foliation(ref, base_dir):
    if isinstance(ref, str):
        text = (Path(base_dir) / ref).read_text() if not ref.lstrip().startswith("vars") else ref
    elif isinstance(ref, dict):
        lines = ["vars " + " ".join(ref["vars"])] + [f"generator {g}" for g in ref["generators"]]
        text = "\n".join(lines)
    else:
        raise ParseError("scenario foliation must be a .fol path, inline text or an object")
    return parse_spec(text).presentation()


class Scenario:
    def __init__(self, data, base_dir="."):
        if data.get("schema", 1) != 1:
            raise ParseError(f"unsupported scenario schema {data.get('schema')!r}")
        self.data = data
        self.name = data.get("name", "")
        self.foliation = load_foliation(data["foliation"], base_dir)
        self.transversal = _transversal(data["transversal"])
        ident = data.get("identification")
        n = self.foliation.n
        if ident:
            self.A = _matrix(ident["matrix"])
            self.b = _vector(ident.get("shift", [0] * n))
        else:
            self.A, self.b = np.eye(n), np.zeros(n)
        if self.A.shape != (n, n) or self.b.shape != (n,):
            raise StructuralError("identification has the wrong shape")
        params = data.get("params", {})
        self.params = FlowParams(step=float(params.get("step", 1e-3)), tol=float(params.get("tol", 1e-6)))
        self.substep = float(params.get("substep", 0.05))
        offs = data.get("offsets")
        self.offsets = None if offs is None else [np.atleast_1d(_vector(o) if isinstance(o, list) else number(o)) for o in offs]
        self.runs = data.get("runs", [])
        self.checks = data.get("checks", [])

    @classmethod
    def load(cls, path):
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
        return cls(data, path.parent)

    def transition_power(self, wraps):
        """``(A^w, b_w)`` with ``T^w(z) = A^w z + b_w``."""
        a, b = np.eye(len(self.b)), np.zeros(len(self.b))
        for _ in range(wraps):
            a, b = self.A @ a, self.A @ b + self.b
        return a, b

    def end_transversal(self, run):
        if "S1" in run:
            return _transversal(run["S1"])
        a, b = self.transition_power(int(run.get("wraps", 0)))
        return self.transversal.transformed(a, b)

    def run_one(self, run):
        path = [_vector(p) for p in run["path"]]
        S0 = _transversal(run["S0"]) if "S0" in run else self.transversal
        S1 = self.end_transversal(run)
        return holonomy_map(self.foliation, path, S0, S1, self.offsets, self.params, substep=self.substep)

    def run(self):
        results = {}
        report = {"schema": 1, "scenario": self.name, "runs": [], "checks": []}
        for run in self.runs:
            res = self.run_one(run)
            results[run["name"]] = res
            entry = {"name": run["name"], **res.to_json()}
            expect = run.get("expect")
            if expect:
                target = _matrix(expect["linearization"])
                err = _rel_err(res.linearization, target)
                entry["expected"] = target.tolist()
                entry["relative_error"] = err
                entry["abs_tol"] = float(expect.get("abs_tol", 0.0))
                entry["rel_tol"] = float(expect.get("rel_tol", 1e-3))
                entry["passed"] = bool(_close(res.linearization, target, entry["rel_tol"], entry["abs_tol"]))
            report["runs"].append(entry)
        for check in self.checks:
            report["checks"].append(_check(check, results))
        report["passed"] = all(r.get("passed", True) for r in report["runs"]) and all(
            c["passed"] for c in report["checks"]
        )
        return report


def _rel_err(a, b):
    return float(np.max(np.abs(a - b)) / max(1e-300, np.max(np.abs(b))))


def _close(a, b, rel, abs_tol=0.0):
    return np.max(np.abs(a - b)) <= rel * np.max(np.abs(b)) + abs_tol


def _check(check, results):
    kind = check["kind"]
    rel = float(check.get("rel_tol", 1e-3))
    if kind == "same":
        names = check["runs"]
        ref = results[names[0]].linearization
        err = max(_rel_err(results[k].linearization, ref) for k in names[1:])
    elif kind == "compose":
        # holonomy of the concatenated path = later map composed after earlier
        total = np.eye(results[check["runs"][0]].linearization.shape[0])
        for k in check["runs"]:
            total = results[k].linearization @ total
        ref = results[check["total"]].linearization
        err = _rel_err(total, ref)
    else:
        raise ParseError(f"unknown scenario check {kind!r}")
    return {**check, "relative_error": err, "passed": bool(err <= rel)}
