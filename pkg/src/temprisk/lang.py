"""Predicate expressions, STL formulas, constraint specs: ASTs, parser, printer.

Concrete syntax
---------------
Predicate expressions (real-valued, satisfied when ``>= 0``)::

    1 - abs(x[1] - x[2])
    max(-(10 - norm2(x[1], x[2])), min(norm2(x[1]-x[3], x[2]-x[4]) - 15, ...))

Components are referenced 1-based as ``x[i]``. Functions: ``abs``, ``norm2``
(any arity), ``min`` and ``max`` (two or more arguments).

Formulas::

    TRUE | pred{e} | pred{e >= c} | pred{e <= c} | NAME | !f | f & f | f | f
    | f U[a,b] f | f S[a,b] f | F[a,b] f | G[a,b] f | P[a,b] f | H[a,b] f

``&`` binds tighter than ``|``; ``U``/``S`` bind tighter than ``&`` and are
right-associative; prefix operators bind tightest. Interval bounds are times
in seconds and are converted to steps with ``round(a / dt)``. A formula file
may start with ``let NAME = <formula>`` definitions.

Constraint files hold ``on [Ta,Tb]: <expr>`` lines (integer steps) and an
optional ``default: <real>`` line.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import SpecSyntaxError, ValidationError

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Predicate expression AST


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 1-based component index


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple


Expr = Union[Const, Var, Neg, BinOp, Call]

FUNCTIONS = {"abs": (1, 1), "norm2": (1, None), "min": (2, None), "max": (2, None)}


def eval_expr(e: Expr, x):
    """Evaluate ``e`` on component values.

    ``x`` is indexable by 0-based component and may hold scalars or numpy
    arrays of a common shape (batched evaluation).
    """
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return x[e.index - 1]
    if isinstance(e, Neg):
        return -eval_expr(e.arg, x)
    if isinstance(e, BinOp):
        a = eval_expr(e.left, x)
        b = eval_expr(e.right, x)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        return a / b
    args = [eval_expr(a, x) for a in e.args]
    if e.fn == "abs":
        return np.abs(args[0])
    if e.fn == "norm2":
        return np.sqrt(sum(a * a for a in args))
    reducer = np.minimum if e.fn == "min" else np.maximum
    out = args[0]
    for a in args[1:]:
        out = reducer(out, a)
    return out


def max_index(e: Expr) -> int:
    """Largest component index referenced by ``e`` (0 if none)."""
    if isinstance(e, Var):
        return e.index
    if isinstance(e, Neg):
        return max_index(e.arg)
    if isinstance(e, BinOp):
        return max(max_index(e.left), max_index(e.right))
    if isinstance(e, Call):
        return max((max_index(a) for a in e.args), default=0)
    return 0


# ---------------------------------------------------------------------------
# STL AST. Interval bounds are integer steps.


@dataclass(frozen=True)
class TrueF:
    pass


@dataclass(frozen=True)
class Pred:
    expr: Expr


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


def _check_interval(lo, hi):
    if lo < 0 or hi < 0:
        raise ValidationError(f"interval [{lo},{hi}] has a negative bound")
    if lo > hi:
        raise ValidationError(f"interval [{lo},{hi}] is reversed")


@dataclass(frozen=True)
class Until:
    left: "Formula"
    right: "Formula"
    lo: int
    hi: int

    def __post_init__(self):
        _check_interval(self.lo, self.hi)


@dataclass(frozen=True)
class UntilPast:
    left: "Formula"
    right: "Formula"
    lo: int
    hi: int

    def __post_init__(self):
        _check_interval(self.lo, self.hi)


@dataclass(frozen=True)
class _Unary:
    arg: "Formula"
    lo: int
    hi: int

    def __post_init__(self):
        _check_interval(self.lo, self.hi)


@dataclass(frozen=True)
class Eventually(_Unary):
    pass


@dataclass(frozen=True)
class EventuallyPast(_Unary):
    pass


@dataclass(frozen=True)
class Always(_Unary):
    pass


@dataclass(frozen=True)
class AlwaysPast(_Unary):
    pass


Formula = Union[TrueF, Pred, Not, And, Or, Until, UntilPast,
                Eventually, EventuallyPast, Always, AlwaysPast]

_PREFIX = {"F": Eventually, "G": Always, "P": EventuallyPast, "H": AlwaysPast}
_PREFIX_NAME = {cls: name for name, cls in _PREFIX.items()}


def desugar(f: Formula) -> Formula:
    """Rewrite into the core grammar: TRUE, pred, !, &, U, S."""
    if isinstance(f, (TrueF, Pred)):
        return f
    if isinstance(f, Not):
        return Not(desugar(f.arg))
    if isinstance(f, And):
        return And(desugar(f.left), desugar(f.right))
    if isinstance(f, Or):
        return Not(And(Not(desugar(f.left)), Not(desugar(f.right))))
    if isinstance(f, Until):
        return Until(desugar(f.left), desugar(f.right), f.lo, f.hi)
    if isinstance(f, UntilPast):
        return UntilPast(desugar(f.left), desugar(f.right), f.lo, f.hi)
    if isinstance(f, Eventually):
        return Until(TrueF(), desugar(f.arg), f.lo, f.hi)
    if isinstance(f, EventuallyPast):
        return UntilPast(TrueF(), desugar(f.arg), f.lo, f.hi)
    if isinstance(f, Always):
        return Not(Until(TrueF(), Not(desugar(f.arg)), f.lo, f.hi))
    if isinstance(f, AlwaysPast):
        return Not(UntilPast(TrueF(), Not(desugar(f.arg)), f.lo, f.hi))
    raise TypeError(f"not a formula: {f!r}")


def formula_max_index(f: Formula) -> int:
    if isinstance(f, TrueF):
        return 0
    if isinstance(f, Pred):
        return max_index(f.expr)
    if isinstance(f, (Not, _Unary)):
        return formula_max_index(f.arg)
    return max(formula_max_index(f.left), formula_max_index(f.right))


def formula_depth(f: Formula) -> int:
    if isinstance(f, (TrueF, Pred)):
        return 1
    if isinstance(f, (Not, _Unary)):
        return 1 + formula_depth(f.arg)
    return 1 + max(formula_depth(f.left), formula_depth(f.right))


# ---------------------------------------------------------------------------
# Constraint specs


@dataclass(frozen=True)
class ConstraintSpec:
    """Piecewise constraint: ``expr_j`` on ``[a_j, b_j]``, ``default`` elsewhere.

    Intervals are integer steps and must be pairwise disjoint.
    """

    pieces: tuple = ()  # ((a, b, Expr), ...)
    default: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.default):
            raise ValidationError("default constraint value must be finite")
        spans = sorted((a, b) for a, b, _ in self.pieces)
        for a, b in spans:
            if a > b:
                raise ValidationError(f"constraint interval [{a},{b}] is reversed")
        for (a0, b0), (a1, b1) in zip(spans, spans[1:]):
            if a1 <= b0:
                raise ValidationError(f"constraint intervals [{a0},{b0}] and [{a1},{b1}] overlap")

    def max_index(self) -> int:
        return max((max_index(e) for _, _, e in self.pieces), default=0)


# ---------------------------------------------------------------------------
# Tokenizer

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>>=|<=|:=|[-+*/()\[\]{},!&|=:])
""", re.VERBOSE)


@dataclass
class Token:
    kind: str  # num | ident | op | eof
    text: str
    line: int
    col: int


def tokenize(text: str) -> list:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise SpecSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str, dt: float = 1.0, env=None):
        self.toks = tokenize(text)
        self.i = 0
        self.dt = dt
        self.env = dict(env or {})

    # -- helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k=1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return SpecSyntaxError(msg, tok.line, tok.col)

    def at(self, text) -> bool:
        return self.tok.kind in ("op", "ident") and self.tok.text == text

    def expect(self, text) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        tok = self.tok
        self.i += 1
        return tok

    def expect_eof(self):
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")

    # -- predicate expressions
    def expr(self) -> Expr:
        left = self.term()
        while self.at("+") or self.at("-"):
            op = self.tok.text
            self.i += 1
            left = BinOp(op, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.at("*") or self.at("/"):
            op = self.tok.text
            self.i += 1
            left = BinOp(op, left, self.unary())
        return left

    def unary(self) -> Expr:
        if self.at("-"):
            self.i += 1
            if self.tok.kind == "num":
                value = float(self.tok.text)
                self.i += 1
                return Const(-value)
            return Neg(self.unary())
        return self.atom()

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Const(float(tok.text))
        if self.at("("):
            self.i += 1
            e = self.expr()
            self.expect(")")
            return e
        if tok.kind == "ident":
            if tok.text == "x" and self.peek().text == "[":
                self.i += 2
                itok = self.tok
                if itok.kind != "num" or not itok.text.isdigit():
                    raise self.error("component index must be a positive integer")
                idx = int(itok.text)
                if idx < 1:
                    raise self.error("component indices are 1-based", itok)
                self.i += 1
                self.expect("]")
                return Var(idx)
            if tok.text in FUNCTIONS and self.peek().text == "(":
                self.i += 2
                args = [self.expr()]
                while self.at(","):
                    self.i += 1
                    args.append(self.expr())
                self.expect(")")
                lo, hi = FUNCTIONS[tok.text]
                if len(args) < lo or (hi is not None and len(args) > hi):
                    raise self.error(f"{tok.text} takes {lo}{'' if hi == lo else '+'} argument(s), got {len(args)}", tok)
                return Call(tok.text, tuple(args))
            raise self.error(f"unknown identifier {tok.text!r}")
        found = tok.text or "end of input"
        raise self.error(f"expected an expression, found {found!r}")

    def comparison(self) -> Expr:
        e = self.expr()
        if self.at(">="):
            self.i += 1
            rhs = self.expr()
            return e if rhs == Const(0.0) else BinOp("-", e, rhs)
        if self.at("<="):
            self.i += 1
            rhs = self.expr()
            return BinOp("-", rhs, e)
        return e

    # -- formulas
    def steps(self, tok_value: float) -> int:
        q = tok_value / self.dt
        k = int(math.floor(abs(q) + 0.5)) * (1 if q >= 0 else -1)
        if abs(q - k) > 1e-9:
            log.info("interval bound %g s is %g steps at dt=%g; rounded to %d", tok_value, q, self.dt, k)
        return k

    def interval(self):
        self.expect("[")
        a = self.signed_number()
        self.expect(",")
        b = self.signed_number()
        close = self.expect("]")
        lo, hi = self.steps(a), self.steps(b)
        try:
            _check_interval(lo, hi)
        except ValidationError as exc:
            raise ValidationError(f"{exc} (line {close.line}, column {close.col})") from None
        return lo, hi

    def signed_number(self) -> float:
        sign = 1.0
        if self.at("-"):
            sign = -1.0
            self.i += 1
        if self.tok.kind != "num":
            raise self.error("expected a number")
        v = float(self.tok.text)
        self.i += 1
        return sign * v

    def formula(self) -> Formula:
        left = self.conj()
        while self.at("|"):
            self.i += 1
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.until()
        while self.at("&"):
            self.i += 1
            left = And(left, self.until())
        return left

    def until(self) -> Formula:
        left = self.prefix()
        if (self.at("U") or self.at("S")) and self.peek().text == "[":
            past = self.tok.text == "S"
            self.i += 1
            lo, hi = self.interval()
            right = self.until()
            return (UntilPast if past else Until)(left, right, lo, hi)
        return left

    def prefix(self) -> Formula:
        if self.at("!"):
            self.i += 1
            return Not(self.prefix())
        tok = self.tok
        if tok.kind == "ident" and tok.text in _PREFIX and self.peek().text == "[":
            self.i += 1
            lo, hi = self.interval()
            return _PREFIX[tok.text](self.prefix(), lo, hi)
        return self.fatom()

    def fatom(self) -> Formula:
        tok = self.tok
        if self.at("("):
            self.i += 1
            f = self.formula()
            self.expect(")")
            return f
        if self.at("TRUE"):
            self.i += 1
            return TrueF()
        if self.at("pred") and self.peek().text == "{":
            self.i += 2
            e = self.comparison()
            self.expect("}")
            return Pred(e)
        if tok.kind == "ident" and tok.text != "let":
            if tok.text in self.env:
                self.i += 1
                return self.env[tok.text]
            raise self.error(f"unknown identifier {tok.text!r}")
        found = tok.text or "end of input"
        raise self.error(f"expected a formula, found {found!r}")

    def formula_file(self) -> Formula:
        while self.at("let"):
            self.i += 1
            name = self.tok
            if name.kind != "ident":
                raise self.error("expected a name after 'let'")
            self.i += 1
            if not (self.at("=") or self.at(":=")):
                raise self.error("expected '=' in definition")
            self.i += 1
            self.env[name.text] = self.formula()
        f = self.formula()
        self.expect_eof()
        return f

    def constraint_file(self) -> ConstraintSpec:
        pieces = []
        default = 1.0
        seen_default = False
        while self.tok.kind != "eof":
            if self.at("on"):
                self.i += 1
                self.expect("[")
                a_tok = self.tok
                a = self.signed_number()
                self.expect(",")
                b = self.signed_number()
                self.expect("]")
                self.expect(":")
                if a != int(a) or b != int(b):
                    raise self.error("constraint interval bounds must be integer steps", a_tok)
                pieces.append((int(a), int(b), self.comparison()))
            elif self.at("default"):
                if seen_default:
                    raise self.error("duplicate 'default' line")
                self.i += 1
                self.expect(":")
                default = self.signed_number()
                seen_default = True
            else:
                raise self.error(f"expected 'on' or 'default', found {self.tok.text!r}")
        return ConstraintSpec(tuple(pieces), default)


# ---------------------------------------------------------------------------
# Public parsing API


def parse_predicate(text: str) -> Expr:
    p = _Parser(text)
    e = p.comparison()
    p.expect_eof()
    return e


def parse_formula(text: str, dt: float = 1.0, env=None) -> Formula:
    """Parse a formula (optionally preceded by ``let`` definitions)."""
    if not dt > 0:
        raise ValidationError(f"dt must be positive, got {dt}")
    return _Parser(text, dt, env).formula_file()


def parse_constraint(text: str) -> ConstraintSpec:
    return _Parser(text).constraint_file()


def is_constraint_text(text: str) -> bool:
    """Heuristic used by the CLI: constraint files start statements with ``on``/``default``."""
    for line in text.splitlines():
        s = line.split("#", 1)[0].strip()
        if s:
            return s.startswith("on ") or s.startswith("on[") or s.startswith("default")
    return False


# ---------------------------------------------------------------------------
# Printing


def _num(v: float) -> str:
    return repr(float(v))


_EXPR_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _expr_prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _EXPR_PREC[e.op]
    if isinstance(e, Neg) or (isinstance(e, Const) and e.value < 0):
        return 3
    return 4


def format_expr(e: Expr) -> str:
    if isinstance(e, Const):
        return _num(e.value)
    if isinstance(e, Var):
        return f"x[{e.index}]"
    if isinstance(e, Neg):
        inner = format_expr(e.arg)
        # keep "-(3.0)" distinct from the folded literal "-3.0"
        if _expr_prec(e.arg) < 3 or (isinstance(e.arg, Const) and e.arg.value >= 0):
            inner = f"({inner})"
        return "-" + inner
    if isinstance(e, BinOp):
        p = _EXPR_PREC[e.op]
        left = format_expr(e.left)
        right = format_expr(e.right)
        if _expr_prec(e.left) < p:
            left = f"({left})"
        if _expr_prec(e.right) <= p:
            right = f"({right})"
        return f"{left} {e.op} {right}"
    return f"{e.fn}({', '.join(format_expr(a) for a in e.args)})"


def _time(k: int, dt: float) -> str:
    return format(k * dt, ".12g")


def _fprec(f: Formula) -> int:
    if isinstance(f, Or):
        return 1
    if isinstance(f, And):
        return 2
    if isinstance(f, (Until, UntilPast)):
        return 3
    if isinstance(f, (Not, _Unary)):
        return 4
    return 5


def format_formula(f: Formula, dt: float = 1.0) -> str:
    """Canonical text; ``parse_formula(format_formula(f, dt), dt) == f``."""
    if isinstance(f, TrueF):
        return "TRUE"
    if isinstance(f, Pred):
        return "pred{" + format_expr(f.expr) + "}"
    if isinstance(f, Not):
        inner = format_formula(f.arg, dt)
        return "!" + (inner if _fprec(f.arg) >= 4 else f"({inner})")
    if isinstance(f, _Unary):
        inner = format_formula(f.arg, dt)
        if _fprec(f.arg) < 4:
            inner = f"({inner})"
        return f"{_PREFIX_NAME[type(f)]}[{_time(f.lo, dt)},{_time(f.hi, dt)}] {inner}"
    if isinstance(f, (Until, UntilPast)):
        op = "S" if isinstance(f, UntilPast) else "U"
        left = format_formula(f.left, dt)
        right = format_formula(f.right, dt)
        if _fprec(f.left) <= 3:
            left = f"({left})"
        if _fprec(f.right) < 3:
            right = f"({right})"
        return f"{left} {op}[{_time(f.lo, dt)},{_time(f.hi, dt)}] {right}"
    p = _fprec(f)
    sym = "|" if isinstance(f, Or) else "&"
    left = format_formula(f.left, dt)
    right = format_formula(f.right, dt)
    if _fprec(f.left) < p:
        left = f"({left})"
    if _fprec(f.right) <= p:
        right = f"({right})"
    return f"{left} {sym} {right}"


def format_constraint(c: ConstraintSpec) -> str:
    lines = [f"on [{a},{b}]: {format_expr(e)}" for a, b, e in c.pieces]
    lines.append(f"default: {_num(c.default)}")
    return "\n".join(lines) + "\n"
