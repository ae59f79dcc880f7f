"""Text syntax for polynomials, vector fields and ``.fol`` foliation files.

A ``.fol`` file looks like::

    # the Euler and rotation fields
    name F0
    vars x y
    generator x*dx + y*dy
    generator y*dx - x*dy

Expressions use ``+ - * / ^``, parentheses, integer literals and ``d<var>``
(or ``d<index>``) for the coordinate derivative in that variable.
"""

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ParseError
from .exactalg.polynomial import Polynomial, default_names
from .vfield import VectorField

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|([-+*/^()]))")


def _tokenize(text, line, col0):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", line, col0 + bad + 1)
        kind = "num" if m.group(1) else "ident" if m.group(2) else "op"
        start = m.start(m.lastindex)
        tokens.append((kind, m.group(m.lastindex), col0 + start + 1))
        pos = m.end()
    tokens.append(("end", "", col0 + len(text.rstrip()) + 1))
    return tokens


class _ExprParser:
    """Recursive descent; values are Polynomials (scalars) or VectorFields."""

    def __init__(self, text, names, line=1, col0=0):
        self.names = list(names)
        self.n = len(self.names)
        self.index = {v: i for i, v in enumerate(self.names)}
        self.tokens = _tokenize(text, line, col0)
        self.k = 0
        self.line = line

    def peek(self):
        return self.tokens[self.k]

    def take(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ParseError(msg, self.line, tok[2])

    def parse(self):
        value = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise self.error(f"unexpected {tok[1]!r}")
        return value

    def expr(self):
        value = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()
            rhs = self.term()
            value = self.combine(value, rhs, op)
        return value

    def combine(self, a, b, op):
        if isinstance(a, VectorField) != isinstance(b, VectorField):
            raise self.error("cannot add a scalar and a vector field", op)
        return a + b if op[1] == "+" else a - b

    def term(self):
        value = self.factor()
        while self.peek()[:2] in (("op", "*"), ("op", "/")):
            op = self.take()
            rhs = self.factor()
            if op[1] == "*":
                if isinstance(value, VectorField) and isinstance(rhs, VectorField):
                    raise self.error("cannot multiply two vector fields", op)
                if isinstance(rhs, VectorField):
                    value, rhs = rhs, value
                value = value.scale(rhs) if isinstance(value, VectorField) else value * rhs
            else:
                if isinstance(rhs, VectorField) or not rhs.is_constant():
                    raise self.error("can only divide by a constant", op)
                c = rhs.constant_value()
                if not c:
                    raise self.error("division by zero", op)
                value = value.scale(Fraction(1) / c) if isinstance(value, VectorField) else value / c
        return value

    def factor(self):
        tok = self.peek()
        if tok[:2] == ("op", "-"):
            self.take()
            return -self.factor()
        if tok[:2] == ("op", "+"):
            self.take()
            return self.factor()
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            op = self.take()
            exp = self.take()
            if exp[0] != "num":
                raise self.error("exponent must be a non-negative integer", exp)
            if isinstance(base, VectorField):
                raise self.error("cannot raise a vector field to a power", op)
            base = base ** int(exp[1])
        return base

    def atom(self):
        tok = self.take()
        kind, text, col = tok
        if kind == "num":
            return Polynomial.constant(self.n, int(text))
        if kind == "ident":
            if text in self.index:
                return Polynomial.var(self.n, self.index[text])
            if text.startswith("d"):
                rest = text[1:]
                if rest in self.index:
                    return VectorField.coordinate(self.n, self.index[rest])
                if rest.isdigit() and int(rest) < self.n:
                    return VectorField.coordinate(self.n, int(rest))
            raise ParseError(f"undeclared variable {text!r}", self.line, col)
        if text == "(":
            value = self.expr()
            close = self.take()
            if close[:2] != ("op", ")"):
                raise self.error("expected ')'", close)
            return value
        if kind == "end":
            raise ParseError("unexpected end of expression", self.line, col)
        raise ParseError(f"unexpected {text!r}", self.line, col)


def parse_expression(text, names, line=1, col0=0):
    return _ExprParser(text, names, line, col0).parse()


def parse_polynomial(text, names):
    value = parse_expression(text, names)
    if isinstance(value, VectorField):
        raise ParseError("expected a scalar polynomial, got a vector field", 1, 1)
    return value


def parse_field(text, names):
    value = parse_expression(text, names)
    if not isinstance(value, VectorField):
        raise ParseError("expected a vector field (use d<var>)", 1, 1)
    return value


def format_polynomial(p, names=None):
    return p.to_str(names)


def format_field(X, names=None):
    names = names or default_names(X.n)
    pieces = []
    for i, p in enumerate(X.components):
        if p.is_zero():
            continue
        d = "d" + names[i]
        if len(p) == 1:
            (exp, c), = p.items()
            mono = Polynomial(p.n_vars, {exp: abs(c)})
            body = d if mono == 1 else f"{mono.to_str(names)}*{d}"
            pieces.append((c < 0, body))
        else:
            pieces.append((False, f"({p.to_str(names)})*{d}"))
    if not pieces:
        return "0"
    neg, body = pieces[0]
    out = ("-" if neg else "") + body
    for neg, body in pieces[1:]:
        out += (" - " if neg else " + ") + body
    return out


@dataclass
class FoliationSpecFile:
    vars: tuple
    generators: tuple
    name: str = ""
    citation: str = ""
    zero: bool = False
    extra: dict = field(default_factory=dict)

    def to_text(self):
        lines = []
        if self.name:
            lines.append(f"name {self.name}")
        if self.citation:
            lines.append(f"citation {self.citation}")
        lines.append("vars " + " ".join(self.vars))
        if self.zero:
            lines.append("zero")
        for X in self.generators:
            lines.append("generator " + format_field(X, list(self.vars)))
        return "\n".join(lines) + "\n"

    def presentation(self):
        from .folcore import FoliationPresentation

        return FoliationPresentation(
            self.generators, n=len(self.vars), names=self.vars, name=self.name, zero=self.zero
        )


def _check_vars(names, line, col):
    seen = set()
    for v in names:
        if not _IDENT.fullmatch(v):
            raise ParseError(f"bad variable name {v!r}", line, col)
        if v in seen:
            raise ParseError(f"variable {v!r} declared twice", line, col)
        seen.add(v)
    for v in names:
        if v.startswith("d") and (v[1:] in seen or v[1:].isdigit()):
            raise ParseError(f"variable {v!r} clashes with derivative syntax", line, col)


def parse_spec(text):
    """Parse a ``.fol`` document into a :class:`FoliationSpecFile`."""
    names = None
    gens = []
    meta = {"name": "", "citation": ""}
    zero = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        stripped = body.strip()
        if not stripped:
            continue
        col = len(body) - len(body.lstrip()) + 1
        word, _, rest = stripped.partition(" ")
        rest_col = col + len(word) + 1 + (len(rest) - len(rest.lstrip()))
        rest = rest.strip()
        if word in meta:
            meta[word] = rest
        elif word == "vars":
            if names is not None:
                raise ParseError("duplicate vars line", lineno, col)
            names = rest.split()
            _check_vars(names, lineno, rest_col)
        elif word == "generator":
            if names is None:
                raise ParseError("generator before vars declaration", lineno, col)
            if not rest:
                raise ParseError("empty generator", lineno, rest_col)
            offset = body.index(rest, col - 1 + len(word))
            value = parse_expression(rest, names, lineno, offset)
            if not isinstance(value, VectorField):
                raise ParseError("generator must be a vector field (use d<var>)", lineno, rest_col)
            if value.is_zero():
                raise ParseError("zero generator", lineno, rest_col)
            gens.append(value)
        elif word == "zero":
            zero = True
        else:
            raise ParseError(f"unknown directive {word!r}", lineno, col)
    if names is None:
        raise ParseError("missing vars declaration", 1, 1)
    if zero and gens:
        raise ParseError("zero foliation cannot list generators", 1, 1)
    if not zero and not gens:
        raise ParseError("no generators (declare 'zero' for the zero foliation)", 1, 1)
    return FoliationSpecFile(tuple(names), tuple(gens), meta["name"], meta["citation"], zero)


def spec_from_presentation(F):
    return FoliationSpecFile(tuple(F.names), tuple(F.generators), F.name, "", F.zero)


def parse_number(text):
    """Integers and ``p/q`` are exact Fractions; decimal or exponent literals are floats."""
    text = text.strip()
    if re.fullmatch(r"[-+]?\d+(/\d+)?", text):
        try:
            return Fraction(text)
        except ZeroDivisionError:
            raise ParseError(f"zero denominator in {text!r}") from None
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"bad number {text!r}") from None


def parse_point(text):
    """``"0,1/2"`` -> ``([0, 1/2], exact)``."""
    if not text.strip():
        return [], True
    coords = [parse_number(t) for t in text.split(",")]
    exact = all(isinstance(c, Fraction) for c in coords)
    return coords, exact


def parse_directions(text):
    """``"1,0;0,1"`` -> list of direction vectors."""
    out = []
    for chunk in text.split(";"):
        coords, _ = parse_point(chunk)
        out.append(coords)
    return out
