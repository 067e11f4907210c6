"""Expression language for the join algebra: AST, parser, printer, evaluator.

Precedence, loosest to tightest:  \\/ (join)  <  + -  <  * /  <  ^
(right-associative)  <  unary minus and function application.  So
``a + n*z \\/ b`` is the join of ``a + n*z`` with ``b``, matching the
decluttered join-polynomial notation.  ``v`` and the UTF-8 vee are
accepted as join aliases, ``-inf`` is the bottom literal, and
``oplus[n](a,b)``, ``inv[n](a)``, ``D[n](f)`` are explicit forms.
Implicit multiplication is rejected.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import DomainError, UnboundVariable, UndefinedForm, UnsupportedNode
from .numtower import (
    BOTTOM,
    BranchPolicy,
    JoinComplex,
    NEG_INF,
    POS_INF,
    cx_exp,
    cx_log,
    jc,
)
from .levels import cx_inverse, cx_join, cx_oplus, ext_exp, ext_log, inverse, join, oplus

FUNCTIONS = ("exp", "log", "sin", "cos", "cosh", "sinh", "tanh")
_KEYWORDS = frozenset(FUNCTIONS) | {"oplus", "inv", "D", "i", "e", "pi", "v", "inf"}


class Expr:
    """Base class for AST nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Const(Expr):
    value: JoinComplex


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Join(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class OplusN(Expr):
    n: int
    left: Expr
    right: Expr


@dataclass(frozen=True)
class InvN(Expr):
    n: int
    arg: Expr


@dataclass(frozen=True)
class Apply(Expr):
    fn: str
    arg: Expr


@dataclass(frozen=True)
class DerivN(Expr):
    n: int
    arg: Expr


class ParseError(Exception):
    """Syntax error with byte offset, expectation, and offending lexeme."""

    def __init__(self, position: int, expected: str, found: str):
        self.position = position
        self.expected = expected
        self.found = found
        super().__init__(f"at offset {position}: expected {expected}, found {found!r}")


# --- lexer -----------------------------------------------------------------

_SYMBOLS = ("+", "-", "*", "/", "^", "(", ")", "[", "]", ",")


def _tokenize(text: str) -> list[tuple[str, object, int]]:
    """Produce (kind, value, position) triples; kinds are NUM, NAME, JOIN,
    NEGINF, and literal symbol characters."""
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c == "\\" and text.startswith("\\/", i):
            toks.append(("JOIN", "\\/", i))
            i += 2
            continue
        if c == "∨":  # UTF-8 vee
            toks.append(("JOIN", c, i))
            i += 1
            continue
        if c == "-" and text.startswith("-inf", i) and not _is_word(text, i + 4):
            toks.append(("NEGINF", "-inf", i))
            i += 4
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == "." and j + 1 < n and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    while k < n and text[k].isdigit():
                        k += 1
                    j = k
            toks.append(("NUM", float(text[i:j]), i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            name = text[i:j]
            if name == "v":
                toks.append(("JOIN", "v", i))
            else:
                toks.append(("NAME", name, i))
            i = j
            continue
        if c in _SYMBOLS:
            toks.append((c, c, i))
            i += 1
            continue
        raise ParseError(i, "a token", c)
    toks.append(("EOF", "", n))
    return toks


def _is_word(text: str, i: int) -> bool:
    return i < len(text) and (text[i].isalnum() or text[i] == "_")


# --- parser ----------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos]

    def next(self):
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, kind: str, what: str):
        t = self.next()
        if t[0] != kind:
            raise ParseError(t[2], what, str(t[1]) or "end of input")
        return t

    def parse(self) -> Expr:
        e = self.join_expr()
        t = self.peek()
        if t[0] != "EOF":
            raise ParseError(t[2], "end of input", str(t[1]))
        return e

    def join_expr(self) -> Expr:
        left = self.add_expr()
        while self.peek()[0] == "JOIN":
            self.next()
            left = Join(left, self.add_expr())
        return left

    def add_expr(self) -> Expr:
        left = self.mul_expr()
        while self.peek()[0] in ("+", "-"):
            op = self.next()[0]
            right = self.mul_expr()
            left = Add(left, right) if op == "+" else Sub(left, right)
        return left

    def mul_expr(self) -> Expr:
        left = self.pow_expr()
        while self.peek()[0] in ("*", "/"):
            op = self.next()[0]
            right = self.pow_expr()
            left = Mul(left, right) if op == "*" else Div(left, right)
        return left

    def pow_expr(self) -> Expr:
        base = self.unary_expr()
        if self.peek()[0] == "^":
            self.next()
            return Pow(base, self.pow_expr())
        return base

    def unary_expr(self) -> Expr:
        if self.peek()[0] == "-":
            self.next()
            return Neg(self.unary_expr())
        return self.atom()

    def atom(self) -> Expr:
        t = self.next()
        kind, value, pos = t
        if kind == "NUM":
            return Const(JoinComplex(value, 0.0))
        if kind == "NEGINF":
            return Const(BOTTOM)
        if kind == "(":
            e = self.join_expr()
            self.expect(")", "')'")
            return e
        if kind == "NAME":
            if value == "i":
                return Const(JoinComplex(0.0, 1.0))
            if value == "e":
                return Const(JoinComplex(math.e, 0.0))
            if value == "pi":
                return Const(JoinComplex(math.pi, 0.0))
            if value == "inf":
                raise ParseError(pos, "a literal ('inf' alone is not one; use -inf)", "inf")
            if value in FUNCTIONS:
                self.expect("(", "'(' after function name")
                arg = self.join_expr()
                self.expect(")", "')'")
                return Apply(value, arg)
            if value in ("oplus", "inv", "D"):
                n = self.level_index()
                self.expect("(", f"'(' after {value}[n]")
                first = self.join_expr()
                if value == "oplus":
                    self.expect(",", "','")
                    second = self.join_expr()
                    self.expect(")", "')'")
                    return OplusN(n, first, second)
                self.expect(")", "')'")
                return InvN(n, first) if value == "inv" else DerivN(n, first)
            return Var(value)
        raise ParseError(pos, "an expression", str(value) or "end of input")

    def level_index(self) -> int:
        self.expect("[", "'['")
        sign = 1
        if self.peek()[0] == "-":
            self.next()
            sign = -1
        t = self.expect("NUM", "an integer level")
        if t[1] != int(t[1]):
            raise ParseError(t[2], "an integer level", str(t[1]))
        self.expect("]", "']'")
        return sign * int(t[1])


def parse(text: str) -> Expr:
    """Parse the expression language; raises ParseError on bad input."""
    return _Parser(text).parse()


# --- printer ---------------------------------------------------------------

_PREC_JOIN, _PREC_ADD, _PREC_MUL, _PREC_POW, _PREC_UNARY, _PREC_ATOM = 1, 2, 3, 4, 5, 6


def _fmt_real(v: float) -> str:
    if v == math.pi:
        return "pi"
    if v == math.e:
        return "e"
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _fmt_const(c: JoinComplex) -> tuple[str, int]:
    if c.is_bottom:
        return "-inf", _PREC_ATOM
    if c.im == 0.0:
        s = _fmt_real(c.re)
        return s, (_PREC_UNARY if s.startswith("-") else _PREC_ATOM)
    if c.re == 0.0 and c.im == 1.0:
        return "i", _PREC_ATOM
    # General complex constants have no literal form; emit an arithmetic
    # expression that evaluates to the same value.
    return f"({_fmt_real(c.re)} + {_fmt_real(c.im)}*i)", _PREC_ATOM


def _print(e: Expr) -> tuple[str, int]:
    if isinstance(e, Const):
        return _fmt_const(e.value)
    if isinstance(e, Var):
        return e.name, _PREC_ATOM
    if isinstance(e, Neg):
        s, p = _print(e.arg)
        if p < _PREC_UNARY:
            s = f"({s})"
        return f"-{s}", _PREC_UNARY
    if isinstance(e, Apply):
        return f"{e.fn}({_print(e.arg)[0]})", _PREC_ATOM
    if isinstance(e, OplusN):
        return f"oplus[{e.n}]({_print(e.left)[0]}, {_print(e.right)[0]})", _PREC_ATOM
    if isinstance(e, InvN):
        return f"inv[{e.n}]({_print(e.arg)[0]})", _PREC_ATOM
    if isinstance(e, DerivN):
        return f"D[{e.n}]({_print(e.arg)[0]})", _PREC_ATOM
    if isinstance(e, Pow):
        ls, lp = _print(e.left)
        rs, rp = _print(e.right)
        if lp <= _PREC_POW:
            ls = f"({ls})"
        if rp < _PREC_POW:
            rs = f"({rs})"
        return f"{ls}^{rs}", _PREC_POW
    for cls, sym, prec in (
        (Mul, "*", _PREC_MUL),
        (Div, "/", _PREC_MUL),
        (Add, "+", _PREC_ADD),
        (Sub, "-", _PREC_ADD),
        (Join, "\\/", _PREC_JOIN),
    ):
        if isinstance(e, cls):
            ls, lp = _print(e.left)
            rs, rp = _print(e.right)
            if lp < prec:
                ls = f"({ls})"
            if rp <= prec:
                rs = f"({rs})"
            return f"{ls} {sym} {rs}", prec
    raise UnsupportedNode(f"cannot print {e!r}")


def print_expr(e: Expr) -> str:
    """Minimal-parenthesization text that re-parses to the same AST."""
    return _print(e)[0]


# --- free variables and evaluation -----------------------------------------


def free_vars(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, (Const,)):
        return set()
    if isinstance(e, (Neg, InvN, Apply, DerivN)):
        return free_vars(e.arg)
    return free_vars(e.left) | free_vars(e.right)


def deriv_var(e: Expr) -> str:
    """The variable a derivative operator acts on: z if present, else x,
    else the unique free variable, else z by convention."""
    names = free_vars(e)
    if "z" in names:
        return "z"
    if "x" in names:
        return "x"
    if len(names) == 1:
        return next(iter(names))
    if not names:
        return "z"
    raise UnsupportedNode(f"ambiguous derivative variable among {sorted(names)}")


def _env_jc(env, name: str) -> JoinComplex:
    if name not in env:
        raise UnboundVariable(f"variable {name!r} is not bound")
    return jc(env[name])


def _eval_cx(e: Expr, env, policy: BranchPolicy, bounds) -> JoinComplex:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return _env_jc(env, e.name)
    if isinstance(e, Neg):
        v = _eval_cx(e.arg, env, policy, bounds)
        if v.is_bottom:
            raise DomainError("negation of bottom")
        return JoinComplex(-v.re, -v.im)
    if isinstance(e, Join):
        return cx_join(
            _eval_cx(e.left, env, policy, bounds),
            _eval_cx(e.right, env, policy, bounds),
            policy,
        )
    if isinstance(e, OplusN):
        return cx_oplus(
            e.n,
            _eval_cx(e.left, env, policy, bounds),
            _eval_cx(e.right, env, policy, bounds),
            policy,
            bounds,
        )
    if isinstance(e, InvN):
        return cx_inverse(e.n, _eval_cx(e.arg, env, policy, bounds), policy, bounds)
    if isinstance(e, Apply):
        v = _eval_cx(e.arg, env, policy, bounds)
        if e.fn == "exp":
            return cx_exp(v)
        if v.is_bottom:
            raise DomainError(f"{e.fn} of bottom")
        if e.fn == "log":
            return cx_log(v, policy)
        try:
            w = getattr(cmath, e.fn)(v.z)
        except (OverflowError, ValueError) as exc:
            raise DomainError(str(exc)) from None
        return jc(w)
    if isinstance(e, DerivN):
        from . import calculus

        var = deriv_var(e.arg)
        at = _env_jc(env, var) if (var in env or free_vars(e.arg)) else jc(0)
        return calculus.n_derivative(e.n, e.arg, at, var=var, policy=policy)
    if isinstance(e, (Add, Sub, Mul, Div, Pow)):
        a = _eval_cx(e.left, env, policy, bounds)
        b = _eval_cx(e.right, env, policy, bounds)
        if isinstance(e, (Add, Sub)):
            if isinstance(e, Sub) and b.is_bottom:
                raise DomainError("subtraction of bottom")
            if a.is_bottom or b.is_bottom:
                return BOTTOM
            w = a.z + b.z if isinstance(e, Add) else a.z - b.z
            return jc(w)
        if a.is_bottom or b.is_bottom:
            raise DomainError("bottom operand in *, /, or ^")
        try:
            if isinstance(e, Mul):
                w = a.z * b.z
            elif isinstance(e, Div):
                w = a.z / b.z
            else:
                w = a.z ** b.z
        except ZeroDivisionError:
            raise DomainError("division by zero") from None
        except (OverflowError, ValueError) as exc:
            raise DomainError(str(exc)) from None
        return jc(w)
    raise UnsupportedNode(f"cannot evaluate {e!r}")


def _demote(v: JoinComplex) -> float:
    if v.is_bottom:
        return NEG_INF
    if abs(v.im) > 1e-9 * max(1.0, abs(v.re)):
        raise DomainError(f"complex result {v!r} in real mode")
    return v.re


def _eval_real(e: Expr, env, policy: BranchPolicy, bounds) -> float:
    if isinstance(e, Const):
        if e.value.is_bottom:
            return NEG_INF
        if e.value.im != 0.0:
            raise DomainError("complex constant in real mode")
        return e.value.re
    if isinstance(e, Var):
        if e.name not in env:
            raise UnboundVariable(f"variable {e.name!r} is not bound")
        v = env[e.name]
        if isinstance(v, JoinComplex):
            return _demote(v)
        return float(v)
    if isinstance(e, Neg):
        return -_eval_real(e.arg, env, policy, bounds)
    if isinstance(e, Join):
        return join(
            _eval_real(e.left, env, policy, bounds),
            _eval_real(e.right, env, policy, bounds),
        )
    if isinstance(e, OplusN):
        return oplus(
            e.n,
            _eval_real(e.left, env, policy, bounds),
            _eval_real(e.right, env, policy, bounds),
            bounds,
        )
    if isinstance(e, InvN):
        return inverse(e.n, _eval_real(e.arg, env, policy, bounds), bounds)
    if isinstance(e, Apply):
        v = _eval_real(e.arg, env, policy, bounds)
        if e.fn == "exp":
            return ext_exp(v)
        if e.fn == "log":
            return ext_log(v)
        if math.isinf(v):
            raise DomainError(f"{e.fn} of {v}")
        try:
            return getattr(math, e.fn)(v)
        except (OverflowError, ValueError) as exc:
            raise DomainError(str(exc)) from None
    if isinstance(e, DerivN):
        # Derivatives are computed in the complex machinery and demoted.
        return _demote(_eval_cx(e, env, policy, bounds))
    if isinstance(e, (Add, Sub, Mul, Div, Pow)):
        a = _eval_real(e.left, env, policy, bounds)
        b = _eval_real(e.right, env, policy, bounds)
        try:
            if isinstance(e, Add):
                r = a + b
            elif isinstance(e, Sub):
                r = a - b
            elif isinstance(e, Mul):
                r = a * b
            elif isinstance(e, Div):
                r = a / b
            else:
                r = math.pow(a, b) if not (math.isinf(a) or math.isinf(b)) else a ** b
        except ZeroDivisionError:
            raise DomainError("division by zero") from None
        except (OverflowError, ValueError) as exc:
            raise DomainError(str(exc)) from None
        if math.isnan(r):
            raise UndefinedForm(f"undefined form in real {type(e).__name__.lower()}")
        return r
    raise UnsupportedNode(f"cannot evaluate {e!r}")


def eval_expr(
    e: Expr,
    env=None,
    mode: str = "complex",
    policy: BranchPolicy = BranchPolicy.PRINCIPAL,
    bounds=None,
):
    """Evaluate an expression.

    Complex mode returns a JoinComplex; real mode returns a float in the
    extended reals (with -inf standing in for bottom).
    """
    env = env or {}
    if mode == "complex":
        return _eval_cx(e, env, policy, bounds)
    if mode == "real":
        return _eval_real(e, env, policy, bounds)
    raise ValueError(f"unknown mode {mode!r}")
