"""The ``.sys`` text format: lexer, parser, canonical printer and evaluator.

A file is a list of statements separated by newlines or ``;``::

    # the (1,3) example
    vars x1 x2 x3 x4
    field Y = x1*d(x1) + x2*d(x2) - x3*d(x3) - x4*d(x4)
    integral G = x1*x3
    truncation 6
    point P = (1, 0, 0, -1/2)

Expressions use ``+ - * / ^`` over integer literals, declared variables and
basis vectors ``d(x)``.  Rationals are written as quotients; floating-point
literals are rejected.  Every diagnostic carries a ``line:col`` span.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .errors import InputError
from .series import DEFAULT_ORDER, MPoly, PolyVectorField
from .sysmodel import IntegrableSystem

KEYWORDS = ("vars", "field", "integral", "truncation", "point")


@dataclass(frozen=True)
class Span:
    line: int
    col: int
    end_line: int
    end_col: int

    def __str__(self):
        return f"{self.line}:{self.col}"


class ParseError(InputError):
    def __init__(self, message: str, span: Span, path: str | None = None):
        self.message = message
        self.span = span
        self.path = path
        super().__init__(self._format())

    def _format(self):
        where = f"{self.path}:" if self.path else ""
        return f"{where}{self.span}: {self.message}"

    def with_path(self, path: str) -> "ParseError":
        return ParseError(self.message, self.span, path)


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Num:
    value: int
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Var:
    name: str
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Basis:
    var: str
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exp: int
    span: Span | None = field(default=None, compare=False, repr=False)


Expr = Union[Num, Var, Basis, Unary, BinOp, Pow]


@dataclass(frozen=True)
class VarsDecl:
    names: tuple
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class FieldDecl:
    name: str
    expr: Expr
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class IntegralDecl:
    name: str
    expr: Expr
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class TruncationDecl:
    value: int
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class PointDecl:
    name: str
    coords: tuple
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SourceFile:
    statements: tuple

    def of_type(self, kind):
        return [s for s in self.statements if isinstance(s, kind)]


# ---------------------------------------------------------------------------
# lexer


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: Span


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<newline>\n)
  | (?P<float>\d+\.\d*|\.\d+|\d+[eE][+-]?\d+)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()=,;])
""", re.VERBOSE)


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", Span(line, col, line, col + 1))
        kind = m.lastgroup
        s = m.group()
        span = Span(line, col, line, col + len(s))
        if kind == "float":
            raise ParseError(f"floating-point literal {s!r} not allowed; write a quotient such as 3/2", span)
        if kind == "newline":
            tokens.append(Token("sep", s, span))
            line, col = line + 1, 1
        else:
            if kind == "op":
                tokens.append(Token("sep" if s == ";" else s, s, span))
            elif kind in ("int", "ident"):
                tokens.append(Token(kind, s, span))
            col += len(s)
        pos = m.end()
    tokens.append(Token("eof", "", Span(line, col, line, col)))
    return tokens


# ---------------------------------------------------------------------------
# parser


def _join(a: Span, b: Span) -> Span:
    return Span(a.line, a.col, b.end_line, b.end_col)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    @property
    def cur(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def expect(self, kind: str, what: str | None = None) -> Token:
        t = self.cur
        if t.kind != kind:
            found = "end of input" if t.kind == "eof" else ("end of statement" if t.kind == "sep" else repr(t.text))
            raise ParseError(f"expected {what or kind}, found {found}", t.span)
        return self.advance()

    def parse_file(self) -> SourceFile:
        stmts = []
        while True:
            while self.cur.kind == "sep":
                self.advance()
            if self.cur.kind == "eof":
                break
            stmts.append(self.statement())
            if self.cur.kind not in ("sep", "eof"):
                raise ParseError(f"unexpected {self.cur.text!r} after statement", self.cur.span)
        return SourceFile(tuple(stmts))

    def statement(self):
        t = self.cur
        if t.kind != "ident" or t.text not in KEYWORDS:
            raise ParseError(f"expected a statement keyword ({', '.join(KEYWORDS)}), found {t.text!r}", t.span)
        self.advance()
        if t.text == "vars":
            names = []
            last = t.span
            while self.cur.kind == "ident":
                tok = self.advance()
                names.append(tok.text)
                last = tok.span
            if not names:
                raise ParseError("vars needs at least one variable name", self.cur.span)
            return VarsDecl(tuple(names), _join(t.span, last))
        if t.text == "truncation":
            n = self.expect("int", "an integer truncation order")
            return TruncationDecl(int(n.text), _join(t.span, n.span))
        name = self.expect("ident", "a name")
        self.expect("=", "'='")
        if t.text == "point":
            self.expect("(", "'('")
            coords = [self.rational()]
            while self.cur.kind == ",":
                self.advance()
                coords.append(self.rational())
            close = self.expect(")", "')'")
            return PointDecl(name.text, tuple(coords), _join(t.span, close.span))
        expr = self.expr()
        kind = FieldDecl if t.text == "field" else IntegralDecl
        return kind(name.text, expr, _join(t.span, expr.span))

    def rational(self) -> Fraction:
        sign = 1
        if self.cur.kind in ("-", "+"):
            sign = -1 if self.advance().kind == "-" else 1
        num = self.expect("int", "a rational number")
        value = Fraction(int(num.text))
        if self.cur.kind == "/":
            self.advance()
            den = self.expect("int", "a denominator")
            if int(den.text) == 0:
                raise ParseError("zero denominator", den.span)
            value /= int(den.text)
        return sign * value

    def expr(self) -> Expr:
        left = self.term()
        while self.cur.kind in ("+", "-"):
            op = self.advance().kind
            right = self.term()
            left = BinOp(op, left, right, _join(left.span, right.span))
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.cur.kind in ("*", "/"):
            op = self.advance().kind
            right = self.unary()
            left = BinOp(op, left, right, _join(left.span, right.span))
        return left

    def unary(self) -> Expr:
        if self.cur.kind in ("+", "-"):
            t = self.advance()
            operand = self.unary()
            return Unary(t.kind, operand, _join(t.span, operand.span))
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.cur.kind == "^":
            self.advance()
            n = self.expect("int", "a nonnegative integer exponent")
            return Pow(base, int(n.text), _join(base.span, n.span))
        return base

    def atom(self) -> Expr:
        t = self.cur
        if t.kind == "int":
            self.advance()
            return Num(int(t.text), t.span)
        if t.kind == "ident":
            self.advance()
            if t.text == "d" and self.cur.kind == "(":
                self.advance()
                v = self.expect("ident", "a variable name")
                close = self.expect(")", "')'")
                return Basis(v.text, _join(t.span, close.span))
            if t.text in KEYWORDS:
                raise ParseError(f"keyword {t.text!r} cannot be used in an expression", t.span)
            return Var(t.text, t.span)
        if t.kind == "(":
            self.advance()
            inner = self.expr()
            self.expect(")", "')'")
            return inner
        found = "end of input" if t.kind == "eof" else ("end of statement" if t.kind == "sep" else repr(t.text))
        raise ParseError(f"expected an expression, found {found}", t.span)


def parse(text: str, path: str | None = None) -> SourceFile:
    """Parse text into a :class:`SourceFile` (syntax only)."""
    try:
        return _Parser(tokenize(text)).parse_file()
    except ParseError as exc:
        raise exc.with_path(path) if path else exc


# ---------------------------------------------------------------------------
# canonical printer

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Unary):
        return 3
    if isinstance(e, Pow):
        return 4
    return 5


def _wrap(e: Expr, need: bool) -> str:
    s = print_expr(e)
    return f"({s})" if need else s


def print_expr(e: Expr) -> str:
    """Canonical text with the minimal parentheses that preserve the tree."""
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Basis):
        return f"d({e.var})"
    if isinstance(e, Unary):
        return e.op + _wrap(e.operand, _prec(e.operand) < 3)
    if isinstance(e, Pow):
        return _wrap(e.base, _prec(e.base) < 5) + f"^{e.exp}"
    p = _PREC[e.op]
    left = _wrap(e.left, _prec(e.left) < p)
    right = _wrap(e.right, _prec(e.right) <= p)
    if p == 1:
        return f"{left} {e.op} {right}"
    return f"{left}{e.op}{right}"


def _print_rational(q: Fraction) -> str:
    return str(q)


def print_source(src: SourceFile) -> str:
    lines = []
    for s in src.statements:
        if isinstance(s, VarsDecl):
            lines.append("vars " + " ".join(s.names))
        elif isinstance(s, FieldDecl):
            lines.append(f"field {s.name} = {print_expr(s.expr)}")
        elif isinstance(s, IntegralDecl):
            lines.append(f"integral {s.name} = {print_expr(s.expr)}")
        elif isinstance(s, TruncationDecl):
            lines.append(f"truncation {s.value}")
        elif isinstance(s, PointDecl):
            lines.append(f"point {s.name} = (" + ", ".join(_print_rational(q) for q in s.coords) + ")")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# evaluation


@dataclass
class _Val:
    scalar: MPoly | None = None
    vector: list | None = None  # list of MPoly components

    @property
    def is_vector(self) -> bool:
        return self.vector is not None


class _Evaluator:
    def __init__(self, names: list[str], order: int):
        self.names = names
        self.index = {n: i for i, n in enumerate(names)}
        self.m = len(names)
        self.order = order

    def const(self, e: Expr) -> Fraction | None:
        """Value of a constant subexpression, or None when it involves variables."""
        if isinstance(e, Num):
            return Fraction(e.value)
        if isinstance(e, Unary):
            v = self.const(e.operand)
            return None if v is None else (-v if e.op == "-" else v)
        if isinstance(e, Pow):
            v = self.const(e.base)
            return None if v is None else v ** e.exp
        if isinstance(e, BinOp):
            a, b = self.const(e.left), self.const(e.right)
            if a is None or b is None:
                return None
            if e.op == "+":
                return a + b
            if e.op == "-":
                return a - b
            if e.op == "*":
                return a * b
            if b == 0:
                raise ParseError("division by zero", e.span)
            return a / b
        return None

    def eval(self, e: Expr) -> _Val:
        m, N = self.m, self.order
        if isinstance(e, Num):
            return _Val(scalar=MPoly.constant(e.value, m, N))
        if isinstance(e, Var):
            if e.name not in self.index:
                raise ParseError(f"undeclared variable {e.name!r}", e.span)
            return _Val(scalar=MPoly.variable(self.index[e.name], m, N))
        if isinstance(e, Basis):
            if e.var not in self.index:
                raise ParseError(f"undeclared variable {e.var!r} in d()", e.span)
            comps = [MPoly.zero(m, N) for _ in range(m)]
            comps[self.index[e.var]] = MPoly.constant(1, m, N)
            return _Val(vector=comps)
        if isinstance(e, Unary):
            v = self.eval(e.operand)
            if e.op == "+":
                return v
            if v.is_vector:
                return _Val(vector=[-c for c in v.vector])
            return _Val(scalar=-v.scalar)
        if isinstance(e, Pow):
            v = self.eval(e.base)
            if v.is_vector:
                raise ParseError("a vector cannot be raised to a power", e.span)
            return _Val(scalar=v.scalar ** e.exp)
        a = self.eval(e.left)
        if e.op == "/":
            d = self.const(e.right)
            if d is None:
                raise ParseError("division is only allowed by a constant", e.right.span)
            if d == 0:
                raise ParseError("division by zero", e.right.span)
            if a.is_vector:
                return _Val(vector=[c.scale(1 / d) for c in a.vector])
            return _Val(scalar=a.scalar.scale(1 / d))
        b = self.eval(e.right)
        if e.op in ("+", "-"):
            if a.is_vector != b.is_vector:
                raise ParseError("cannot add a scalar and a vector", e.span)
            if a.is_vector:
                f = (lambda x, y: x + y) if e.op == "+" else (lambda x, y: x - y)
                return _Val(vector=[f(x, y) for x, y in zip(a.vector, b.vector)])
            return _Val(scalar=a.scalar + b.scalar if e.op == "+" else a.scalar - b.scalar)
        if a.is_vector and b.is_vector:
            raise ParseError("cannot multiply two vectors", e.span)
        if a.is_vector:
            return _Val(vector=[c * b.scalar for c in a.vector])
        if b.is_vector:
            return _Val(vector=[a.scalar * c for c in b.vector])
        return _Val(scalar=a.scalar * b.scalar)


def build_system(src: SourceFile, path: str | None = None) -> IntegrableSystem:
    """Semantic checks and evaluation into an :class:`IntegrableSystem`."""
    try:
        return _build(src)
    except ParseError as exc:
        raise exc.with_path(path) if path else exc


def _first_span(src: SourceFile) -> Span:
    for s in src.statements:
        if s.span is not None:
            return s.span
    return Span(1, 1, 1, 1)


def _build(src: SourceFile) -> IntegrableSystem:
    decls = src.of_type(VarsDecl)
    if not decls:
        raise ParseError("missing vars declaration", _first_span(src))
    if len(decls) > 1:
        raise ParseError("vars declared more than once", decls[1].span)
    names = list(decls[0].names)
    seen: dict = {}
    for n in names:
        if n == "d" or n in KEYWORDS:
            raise ParseError(f"{n!r} is reserved and cannot name a variable", decls[0].span)
        if n in seen:
            raise ParseError(f"variable {n!r} declared twice", decls[0].span)
        seen[n] = True
    truncs = src.of_type(TruncationDecl)
    if len(truncs) > 1:
        raise ParseError("truncation declared more than once", truncs[1].span)
    order = truncs[0].value if truncs else DEFAULT_ORDER
    if order < 1:
        raise ParseError("truncation must be at least 1", truncs[0].span)
    ev = _Evaluator(names, order)
    used: dict = {}
    fields, fnames, integrals, gnames, points = [], [], [], [], {}
    for s in src.statements:
        if isinstance(s, (FieldDecl, IntegralDecl, PointDecl)):
            if s.name in used or s.name in seen:
                raise ParseError(f"name {s.name!r} already in use", s.span)
            used[s.name] = True
        if isinstance(s, FieldDecl):
            v = ev.eval(s.expr)
            if not v.is_vector:
                raise ParseError(f"field {s.name} must be a combination of d() terms", s.expr.span)
            fields.append(PolyVectorField(v.vector))
            fnames.append(s.name)
        elif isinstance(s, IntegralDecl):
            v = ev.eval(s.expr)
            if v.is_vector:
                raise ParseError(f"integral {s.name} must not contain d() terms", s.expr.span)
            integrals.append(v.scalar)
            gnames.append(s.name)
        elif isinstance(s, PointDecl):
            if len(s.coords) != len(names):
                raise ParseError(f"point {s.name} has {len(s.coords)} coordinates, expected {len(names)}", s.span)
            points[s.name] = tuple(s.coords)
    if not fields:
        raise ParseError("at least one field required", _first_span(src))
    return IntegrableSystem(fields=fields, integrals=integrals, order=order, nvars=len(names),
                            var_names=tuple(names), field_names=tuple(fnames),
                            integral_names=tuple(gnames), points=points)


def parse_system(text: str, path: str | None = None) -> IntegrableSystem:
    return build_system(parse(text, path), path)


def load_system(path: str) -> IntegrableSystem:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_system(text, path)


def render_system(S: IntegrableSystem, points: dict | None = None) -> str:
    """A parseable file for S with expanded polynomial expressions."""
    names = S.var_names
    lines = ["vars " + " ".join(names)]
    for n, X in zip(S.field_names, S.fields):
        body = X.render(names) if not X.is_zero() else f"0*d({names[0]})"
        lines.append(f"field {n} = {body}")
    for n, F in zip(S.integral_names, S.integrals):
        lines.append(f"integral {n} = {F.render(names)}")
    lines.append(f"truncation {S.order}")
    for n, z in (points if points is not None else S.points).items():
        lines.append(f"point {n} = (" + ", ".join(str(q) for q in z) + ")")
    return "\n".join(lines) + "\n"
