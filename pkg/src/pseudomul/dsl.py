"""A small expression language for candidate operations in ``s`` and ``t``.

Grammar (lowest precedence first)::

    expr       := 'if' cond 'then' expr 'else' expr | additive
    cond       := conj ('or' conj)*
    conj       := neg ('and' neg)*
    neg        := 'not' neg | '(' cond ')' | additive CMP additive
    additive   := term (('+' | '-') term)*
    term       := unary (('*' | '/') unary)*
    unary      := ('-' | '+') unary | primary
    primary    := NUMBER | 'inf' | 's' | 't' | FUNC '(' args ')' | '(' expr ')'

Evaluation follows extended-real conventions: ``0 * inf = 0``,
``inf + x = inf``, ``x / inf = 0``; ``inf - x``, ``inf / inf``,
division by zero and out-of-domain ``atanh``/``ln``/``sqrt`` raise
:class:`~pseudomul.ops.EvalError`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Tuple, Union

from .ops import EvalError, PseudoMulOp
from .xreal import XReal

UNARY_FUNCS = ("tanh", "atanh", "exp", "ln", "sqrt")
BINARY_FUNCS = ("max", "min", "pow")
KEYWORDS = ("if", "then", "else", "and", "or", "not", "inf")
COMPARATORS = ("<", "<=", ">", ">=", "==", "!=")


@dataclass(frozen=True)
class SourceSpan:
    """Byte offsets ``[start, end)`` into the UTF-8 source."""

    start: int
    end: int


class DslSyntaxError(ValueError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(message)
        self.message = message
        self.span = span

    def render(self, source: str) -> str:
        """One-line diagnostic followed by the source and a caret marker."""
        raw = source.encode("utf-8")
        col = len(raw[: self.span.start].decode("utf-8", "replace"))
        width = max(1, len(raw[self.span.start : self.span.end].decode("utf-8", "replace")))
        line = source.rstrip("\n")
        return f"error at {self.span.start}..{self.span.end}: {self.message}\n  {line}\n  {' ' * col}{'^' * width}"


# AST ----------------------------------------------------------------------

_NOSPAN = SourceSpan(0, 0)


@dataclass(frozen=True)
class Num:
    value: XReal
    span: SourceSpan = field(default=_NOSPAN, compare=False, repr=False)


@dataclass(frozen=True)
class Var:
    name: str
    span: SourceSpan = field(default=_NOSPAN, compare=False, repr=False)


@dataclass(frozen=True)
class Neg:
    operand: "Expr"
    span: SourceSpan = field(default=_NOSPAN, compare=False, repr=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    span: SourceSpan = field(default=_NOSPAN, compare=False, repr=False)


@dataclass(frozen=True)
class Call:
    func: str
    args: Tuple["Expr", ...]
    span: SourceSpan = field(default=_NOSPAN, compare=False, repr=False)


@dataclass(frozen=True)
class Compare:
    op: str
    left: "Expr"
    right: "Expr"
    span: SourceSpan = field(default=_NOSPAN, compare=False, repr=False)


@dataclass(frozen=True)
class BoolOp:
    op: str  # 'and' | 'or'
    left: "Cond"
    right: "Cond"
    span: SourceSpan = field(default=_NOSPAN, compare=False, repr=False)


@dataclass(frozen=True)
class Not:
    operand: "Cond"
    span: SourceSpan = field(default=_NOSPAN, compare=False, repr=False)


@dataclass(frozen=True)
class If:
    cond: "Cond"
    then: "Expr"
    orelse: "Expr"
    span: SourceSpan = field(default=_NOSPAN, compare=False, repr=False)


Expr = Union[Num, Var, Neg, BinOp, Call, If]
Cond = Union[Compare, BoolOp, Not]
OpExpr = Expr


# Lexer --------------------------------------------------------------------

@dataclass(frozen=True)
class _Tok:
    kind: str  # 'num', 'ident', 'op', 'eof'
    text: str
    start: int  # character offsets; converted to bytes in errors
    end: int


_NUMBER = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_OPS = ("<=", ">=", "==", "!=", "<", ">", "+", "-", "*", "/", "(", ")", ",")


def _tokenize(src: str, err) -> list:
    toks = []
    i, n = 0, len(src)
    while i < n:
        c = src[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and src[i + 1].isdigit()):
            m = _NUMBER.match(src, i)
            j = m.end()
            if j < n and (src[j].isalnum() or src[j] in "._"):
                k = j
                while k < n and (src[k].isalnum() or src[k] in "._+-") and not (
                    src[k] in "+-" and src[k - 1] not in "eE"
                ):
                    k += 1
                err(f"malformed number `{src[i:k]}`", i, k)
            toks.append(_Tok("num", m.group(0), i, j))
            i = j
            continue
        if c.isalpha() or c == "_":
            m = _IDENT.match(src, i)
            toks.append(_Tok("ident", m.group(0), i, m.end()))
            i = m.end()
            continue
        for op in _OPS:
            if src.startswith(op, i):
                toks.append(_Tok("op", op, i, i + len(op)))
                i += len(op)
                break
        else:
            err(f"unexpected character `{c}`", i, i + 1)
    toks.append(_Tok("eof", "", n, n))
    return toks


# Parser -------------------------------------------------------------------

class _Parser:
    def __init__(self, source: str):
        self.src = source
        self.toks = _tokenize(source, self.error)
        self.pos = 0

    def error(self, message: str, start: int, end: int):
        b = lambda i: len(self.src[:i].encode("utf-8"))
        raise DslSyntaxError(message, SourceSpan(b(start), b(end)))

    def span(self, start: int, end: int) -> SourceSpan:
        b = lambda i: len(self.src[:i].encode("utf-8"))
        return SourceSpan(b(start), b(end))

    @property
    def tok(self) -> _Tok:
        return self.toks[self.pos]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("op", "ident") and t.text == text

    def advance(self) -> _Tok:
        t = self.tok
        self.pos += 1
        return t

    def expect(self, text: str, opener: _Tok = None) -> _Tok:
        if self.at(text):
            return self.advance()
        if text == ")" and opener is not None and self.tok.kind == "eof":
            self.error("unbalanced parenthesis", opener.start, opener.end)
        t = self.tok
        found = t.text or "end of input"
        self.error(f"expected `{text}`, found `{found}`", t.start, max(t.end, t.start + 1))

    def parse(self) -> Expr:
        e = self.expr()
        t = self.tok
        if t.kind != "eof":
            if t.text == ")":
                self.error("unbalanced parenthesis", t.start, t.end)
            self.error(f"unexpected `{t.text}`", t.start, t.end)
        return e

    def expr(self) -> Expr:
        if self.at("if"):
            start = self.advance().start
            cond = self.cond()
            self.expect("then")
            then = self.expr()
            self.expect("else")
            orelse = self.expr()
            return If(cond, then, orelse, self.span(start, self.toks[self.pos - 1].end))
        return self.additive()

    def cond(self) -> Cond:
        left = self.conj()
        while self.at("or"):
            self.advance()
            right = self.conj()
            left = BoolOp("or", left, right)
        return left

    def conj(self) -> Cond:
        left = self.neg()
        while self.at("and"):
            self.advance()
            right = self.neg()
            left = BoolOp("and", left, right)
        return left

    def neg(self) -> Cond:
        if self.at("not"):
            start = self.advance().start
            inner = self.neg()
            return Not(inner, self.span(start, self.toks[self.pos - 1].end))
        first_error = None
        if self.at("("):
            # parenthesised condition, else fall back to a comparison
            saved = self.pos
            opener = self.advance()
            try:
                inner = self.cond()
                self.expect(")", opener)
                if not (self.tok.kind == "op" and self.tok.text in COMPARATORS + ("+", "-", "*", "/")):
                    return inner
            except DslSyntaxError as exc:
                first_error = exc
            self.pos = saved
        try:
            return self.comparison()
        except DslSyntaxError as exc:
            if first_error is not None and first_error.span.start > exc.span.start:
                raise first_error from None
            raise

    def comparison(self) -> Compare:
        start = self.tok.start
        left = self.additive()
        t = self.tok
        if not (t.kind == "op" and t.text in COMPARATORS):
            found = t.text or "end of input"
            self.error(f"expected a comparison, found `{found}`", t.start, max(t.end, t.start + 1))
        self.advance()
        right = self.additive()
        return Compare(t.text, left, right, self.span(start, self.toks[self.pos - 1].end))

    def additive(self) -> Expr:
        start = self.tok.start
        left = self.term()
        while self.tok.kind == "op" and self.tok.text in ("+", "-"):
            op = self.advance().text
            right = self.term()
            left = BinOp(op, left, right, self.span(start, self.toks[self.pos - 1].end))
        return left

    def term(self) -> Expr:
        start = self.tok.start
        left = self.unary()
        while self.tok.kind == "op" and self.tok.text in ("*", "/"):
            op = self.advance().text
            right = self.unary()
            left = BinOp(op, left, right, self.span(start, self.toks[self.pos - 1].end))
        return left

    def unary(self) -> Expr:
        if self.tok.kind == "op" and self.tok.text in ("-", "+"):
            t = self.advance()
            operand = self.unary()
            if t.text == "+":
                return operand
            return Neg(operand, self.span(t.start, self.toks[self.pos - 1].end))
        return self.primary()

    def primary(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Num(XReal(float(t.text)), self.span(t.start, t.end))
        if t.kind == "ident":
            name = t.text
            if name == "inf":
                self.advance()
                return Num(XReal("inf"), self.span(t.start, t.end))
            if name in ("s", "t"):
                self.advance()
                return Var(name, self.span(t.start, t.end))
            if name in UNARY_FUNCS or name in BINARY_FUNCS:
                self.advance()
                if not self.at("("):
                    self.error(f"function `{name}` needs arguments", t.start, t.end)
                opener = self.advance()
                args = [self.expr()]
                while self.at(","):
                    self.advance()
                    args.append(self.expr())
                close = self.expect(")", opener)
                arity = 1 if name in UNARY_FUNCS else 2
                if len(args) != arity:
                    self.error(f"`{name}` takes {arity} argument(s), got {len(args)}", t.start, close.end)
                return Call(name, tuple(args), self.span(t.start, close.end))
            if name in KEYWORDS:
                self.error(f"unexpected keyword `{name}`", t.start, t.end)
            self.error(f"unknown identifier `{name}`", t.start, t.end)
        if t.kind == "op" and t.text == "(":
            opener = self.advance()
            inner = self.expr()
            self.expect(")", opener)
            return inner
        if t.kind == "op" and t.text == ")":
            self.error("unbalanced parenthesis", t.start, t.end)
        if t.kind == "eof":
            self.error("unexpected end of input", t.start, t.start)
        self.error(f"unexpected `{t.text}`", t.start, t.end)


def parse(source: str) -> Expr:
    """Parse ``source`` into an AST; raises :class:`DslSyntaxError`."""
    return _Parser(source).parse()


# Printer ------------------------------------------------------------------

def to_source(node) -> str:
    """Print an AST in fully parenthesised form that reparses to itself."""
    if isinstance(node, Num):
        return str(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{to_source(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
    if isinstance(node, Call):
        return f"{node.func}({', '.join(to_source(a) for a in node.args)})"
    if isinstance(node, Compare):
        return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
    if isinstance(node, BoolOp):
        return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
    if isinstance(node, Not):
        return f"(not {to_source(node.operand)})"
    if isinstance(node, If):
        return f"(if {to_source(node.cond)} then {to_source(node.then)} else {to_source(node.orelse)})"
    raise TypeError(f"not an AST node: {node!r}")


# Evaluation ---------------------------------------------------------------

INF = math.inf


def _add(a, b):
    return a + b  # inf - x never reaches here, so no inf + (-inf)


def _sub(a, b):
    if a == INF or b == INF:
        raise EvalError("inf-subtraction")
    return a - b


def _mul(a, b):
    if a == 0.0 or b == 0.0:
        return 0.0
    r = a * b
    if r == -INF:
        raise EvalError("negative-infinity")
    return r


def _div(a, b):
    if b == 0.0:
        raise EvalError("div-by-zero")
    if b == INF or b == -INF:
        if a == INF:
            raise EvalError("inf-over-inf")
        return 0.0
    r = a / b
    if r == -INF:
        raise EvalError("negative-infinity")
    return r


def _neg(a):
    if a == INF:
        raise EvalError("inf-subtraction")
    return -a


def _tanh(a):
    return math.tanh(a)


def _atanh(a):
    if not -1.0 < a < 1.0:
        raise EvalError("atanh-domain", repr(a))
    return math.atanh(a)


def _exp(a):
    try:
        return math.exp(a)
    except OverflowError:
        return INF


def _ln(a):
    if a <= 0.0:
        raise EvalError("ln-domain", repr(a))
    return math.log(a)


def _sqrt(a):
    if a < 0.0:
        raise EvalError("sqrt-domain", repr(a))
    return math.sqrt(a)


def _pow(a, b):
    if a == INF:
        if b > 0:
            return INF
        return 1.0 if b == 0 else 0.0
    if b == INF:
        if a > 1.0:
            return INF
        return 1.0 if a == 1.0 else 0.0
    if a == 0.0:
        if b < 0:
            raise EvalError("div-by-zero", "pow(0, negative)")
        return 1.0 if b == 0 else 0.0
    if a < 0.0 and b != int(b):
        raise EvalError("pow-domain", f"pow({a!r}, {b!r})")
    try:
        return math.pow(a, b)
    except OverflowError:
        if a < 0.0 and int(b) % 2:
            raise EvalError("negative-infinity") from None
        return INF


_BIN = {"+": _add, "-": _sub, "*": _mul, "/": _div}
_FUNCS = {
    "tanh": _tanh, "atanh": _atanh, "exp": _exp, "ln": _ln, "sqrt": _sqrt,
    "max": max, "min": min, "pow": _pow,
}
_CMP = {
    "<": lambda a, b: a < b, "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b, ">=": lambda a, b: a >= b,
    "==": lambda a, b: a == b, "!=": lambda a, b: a != b,
}

Evaluator = Callable[[float, float], float]


def _build(node) -> Evaluator:
    if isinstance(node, Num):
        v = float(node.value)
        return lambda s, t: v
    if isinstance(node, Var):
        return (lambda s, t: s) if node.name == "s" else (lambda s, t: t)
    if isinstance(node, Neg):
        f = _build(node.operand)
        return lambda s, t: _neg(f(s, t))
    if isinstance(node, BinOp):
        fn, l, r = _BIN[node.op], _build(node.left), _build(node.right)
        return lambda s, t: fn(l(s, t), r(s, t))
    if isinstance(node, Call):
        fn = _FUNCS[node.func]
        if len(node.args) == 1:
            a = _build(node.args[0])
            return lambda s, t: fn(a(s, t))
        a, b = (_build(x) for x in node.args)
        return lambda s, t: fn(a(s, t), b(s, t))
    if isinstance(node, Compare):
        fn, l, r = _CMP[node.op], _build(node.left), _build(node.right)
        return lambda s, t: fn(l(s, t), r(s, t))
    if isinstance(node, BoolOp):
        l, r = _build(node.left), _build(node.right)
        if node.op == "and":
            return lambda s, t: l(s, t) and r(s, t)
        return lambda s, t: l(s, t) or r(s, t)
    if isinstance(node, Not):
        f = _build(node.operand)
        return lambda s, t: not f(s, t)
    if isinstance(node, If):
        c, a, b = _build(node.cond), _build(node.then), _build(node.orelse)
        return lambda s, t: a(s, t) if c(s, t) else b(s, t)
    raise TypeError(f"not an AST node: {node!r}")


def _literals(node):
    if isinstance(node, Num):
        yield node.value
    for name in ("operand", "left", "right", "cond", "then", "orelse"):
        child = getattr(node, name, None)
        if child is not None:
            yield from _literals(child)
    for child in getattr(node, "args", ()):
        yield from _literals(child)


def compile(expr: Expr, name: str) -> PseudoMulOp:
    """Turn a parsed expression into an operation.

    No identity is declared; positive finite literals become landmarks.
    """
    body = _build(expr)

    def raw(s: float, t: float) -> float:
        try:
            v = body(s, t)
        except (OverflowError, ValueError, ZeroDivisionError) as exc:
            raise EvalError("arith", str(exc)) from None
        if v != v:
            raise EvalError("nan")
        if v < 0.0:
            raise EvalError("range", f"negative result {v!r}")
        return v + 0.0

    marks = sorted({v for v in _literals(expr) if not v.is_zero and not v.is_inf})
    return PseudoMulOp(name=name, raw=raw, landmarks=tuple(marks))


def load_op_file(path) -> PseudoMulOp:
    """Read a UTF-8 op file holding one expression and compile it."""
    p = Path(path)
    source = p.read_text(encoding="utf-8")
    return compile(parse(source), name=f"@{p}")
