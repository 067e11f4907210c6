"""Derivatives built on the operation chain.

The closed forms are the primary path: the vee-derivative is
Df = f + log(f') - z, levels below -1 recurse downward through the
chain, and level 1 is exp(z*f'/f).  The limit definition is the
independent check; it evaluates the generalized difference quotient
in high-precision arithmetic (mpmath) because the quotient cancels
catastrophically in binary64 long before the successive-iterate test
can pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath as mp

from .errors import DomainError, NoConvergence, Unsupported, UnsupportedNode
from .numtower import BOTTOM, BranchPolicy, JoinComplex, canonicalize, cx_exp, cx_log, jc
from .levels import check_level, cx_inverse, cx_oplus, join
from .expr import (
    Add,
    Apply,
    Const,
    DerivN,
    Div,
    Expr,
    InvN,
    Join,
    Mul,
    Neg,
    OplusN,
    Pow,
    Sub,
    Var,
    deriv_var,
    eval_expr,
)

# --- symbolic differentiation ----------------------------------------------


def _num(v) -> Const:
    return Const(jc(v))


_ZERO = _num(0)
_ONE = _num(1)


def _is_num(e: Expr, v: float) -> bool:
    return isinstance(e, Const) and not e.value.is_bottom and e.value.z == v


def _neg(a: Expr) -> Expr:
    if _is_num(a, 0):
        return _ZERO
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def _add(a: Expr, b: Expr) -> Expr:
    if _is_num(a, 0):
        return b
    if _is_num(b, 0):
        return a
    if isinstance(a, Const) and isinstance(b, Const) and not (a.value.is_bottom or b.value.is_bottom):
        return _num(a.value.z + b.value.z)
    return Add(a, b)


def _sub(a: Expr, b: Expr) -> Expr:
    if _is_num(b, 0):
        return a
    if _is_num(a, 0):
        return _neg(b)
    return Sub(a, b)


def _mul(a: Expr, b: Expr) -> Expr:
    if _is_num(a, 0) or _is_num(b, 0):
        return _ZERO
    if _is_num(a, 1):
        return b
    if _is_num(b, 1):
        return a
    if isinstance(a, Const) and isinstance(b, Const) and not (a.value.is_bottom or b.value.is_bottom):
        return _num(a.value.z * b.value.z)
    return Mul(a, b)


def _div(a: Expr, b: Expr) -> Expr:
    if _is_num(a, 0):
        return _ZERO
    if _is_num(b, 1):
        return a
    return Div(a, b)


_FN_RULES = {
    "exp": lambda u: Apply("exp", u),
    "log": lambda u: Div(_ONE, u),
    "sin": lambda u: Apply("cos", u),
    "cos": lambda u: Neg(Apply("sin", u)),
    "sinh": lambda u: Apply("cosh", u),
    "cosh": lambda u: Apply("sinh", u),
    "tanh": lambda u: _sub(_ONE, Mul(Apply("tanh", u), Apply("tanh", u))),
}


def classic_derivative(f: Expr, var: str | None = None) -> Expr:
    """Symbolic ordinary derivative of f with respect to var.

    The join differentiates as d(u v v) = (e^u u' + e^v v')/(e^u + e^v).
    """
    var = var if var is not None else deriv_var(f)
    return _diff(f, var)


def _diff(f: Expr, var: str) -> Expr:
    if isinstance(f, Const):
        return _ZERO
    if isinstance(f, Var):
        return _ONE if f.name == var else _ZERO
    if isinstance(f, Neg):
        return _neg(_diff(f.arg, var))
    if isinstance(f, Add):
        return _add(_diff(f.left, var), _diff(f.right, var))
    if isinstance(f, Sub):
        return _sub(_diff(f.left, var), _diff(f.right, var))
    if isinstance(f, Mul):
        u, v = f.left, f.right
        return _add(_mul(_diff(u, var), v), _mul(u, _diff(v, var)))
    if isinstance(f, Div):
        u, v = f.left, f.right
        num = _sub(_mul(_diff(u, var), v), _mul(u, _diff(v, var)))
        return _div(num, _mul(v, v))
    if isinstance(f, Pow):
        u, v = f.left, f.right
        du = _diff(u, var)
        if isinstance(v, Const) and not v.value.is_bottom and v.value.im == 0.0:
            c = v.value.re
            if c == 0.0:
                return _ZERO
            return _mul(_mul(_num(c), _pow_simplified(u, c - 1.0)), du)
        dv = _diff(v, var)
        inner = _add(_mul(dv, Apply("log", u)), _div(_mul(v, du), u))
        return _mul(Pow(u, v), inner)
    if isinstance(f, Apply):
        rule = _FN_RULES.get(f.fn)
        if rule is None:
            raise UnsupportedNode(f"no derivative rule for function {f.fn!r}")
        return _mul(rule(f.arg), _diff(f.arg, var))
    if isinstance(f, Join):
        u, v = f.left, f.right
        du, dv = _diff(u, var), _diff(v, var)
        eu, ev = Apply("exp", u), Apply("exp", v)
        return _div(_add(_mul(eu, du), _mul(ev, dv)), _add(eu, ev))
    raise UnsupportedNode(f"no derivative rule for {type(f).__name__}")


def _pow_simplified(u: Expr, c: float) -> Expr:
    if c == 0.0:
        return _ONE
    if c == 1.0:
        return u
    return Pow(u, _num(c))


# --- closed-form derivatives ------------------------------------------------


def vee_derivative(
    f: Expr, z, var: str | None = None, policy: BranchPolicy = BranchPolicy.PRINCIPAL
) -> JoinComplex:
    """The vee-derivative f(z) + log(f'(z)) - z; bottom when f' vanishes."""
    return n_derivative_closed(-1, f, z, var=var, policy=policy)


def n_derivative_closed(
    n: int,
    f: Expr,
    z,
    var: str | None = None,
    policy: BranchPolicy = BranchPolicy.PRINCIPAL,
) -> JoinComplex:
    """Closed-form n-derivative for n <= 1 (levels below -1 recurse down)."""
    if n > 1:
        raise Unsupported(f"no closed form for level {n}; use the limit method")
    z = jc(z)
    var = var if var is not None else deriv_var(f)
    env = {var: z}
    fp = classic_derivative(f, var)
    if n == 0:
        return eval_expr(fp, env, "complex", policy)
    if n == 1:
        fz = eval_expr(f, env, "complex", policy)
        fpz = eval_expr(fp, env, "complex", policy)
        if fz.is_bottom or (fz.re == 0.0 and fz.im == 0.0):
            raise DomainError("level-1 derivative needs f(z) != 0")
        if fpz.is_bottom:
            raise DomainError("level-1 derivative with bottom f'(z)")
        return cx_exp(jc(z.z * fpz.z / fz.z))
    up = n_derivative_closed(n + 1, f, z, var=var, policy=policy)
    lg = cx_log(up, policy)  # raises DomainError for a bottom D_{n+1}
    fz = eval_expr(f, env, "complex", policy)
    acc = cx_oplus(n + 1, fz, lg, policy)
    return canonicalize(cx_oplus(n + 1, acc, cx_inverse(n + 1, z, policy), policy))


def repeat_vee_derivative(
    k: int, f: Expr, z, var: str | None = None, policy: BranchPolicy = BranchPolicy.PRINCIPAL
) -> JoinComplex:
    """k-fold vee-derivative, applied symbolically and then evaluated."""
    if not isinstance(k, int) or k < 1:
        raise DomainError(f"repeat count must be a positive integer, got {k!r}")
    var = var if var is not None else deriv_var(f)
    g = f
    for _ in range(k - 1):
        g = _sub(_add(g, Apply("log", classic_derivative(g, var))), Var(var))
    return vee_derivative(g, z, var=var, policy=policy)


# --- limit-definition derivatives ------------------------------------------

_MP_DPS = 60
_MP_BOTTOM = object()
# Real part below which a join-chain iterate is taken to be diverging to
# the join identity (bottom).
_BOTTOM_FLOOR = -30.0


def _mp_ctx():
    mp.mp.dps = _MP_DPS
    return mp


def _mp_exp(v):
    if v is _MP_BOTTOM:
        return mp.mpc(0)
    return mp.exp(v)


def _mp_log(v):
    if v is _MP_BOTTOM:
        raise DomainError("log of bottom")
    if v == 0:
        return _MP_BOTTOM
    return mp.log(v)


def _mp_join(a, b):
    if a is _MP_BOTTOM:
        return b
    if b is _MP_BOTTOM:
        return a
    m = max(mp.re(a), mp.re(b))
    s = mp.exp(a - m) + mp.exp(b - m)
    if abs(s) < mp.mpf(10) ** (-(_MP_DPS - 20)):
        return _MP_BOTTOM
    return m + mp.log(s)


def _mp_oplus(n, a, b):
    if n == 0:
        if a is _MP_BOTTOM or b is _MP_BOTTOM:
            return _MP_BOTTOM
        return a + b
    if n == -1:
        return _mp_join(a, b)
    if n < -1:
        r = _mp_oplus(n + 1, _mp_exp(a), _mp_exp(b))
        return _mp_log(r)
    return _mp_exp(_mp_oplus(n - 1, _mp_log(a), _mp_log(b)))


def _mp_inverse(n, z):
    if z is _MP_BOTTOM:
        if n == -1:
            return _MP_BOTTOM
        raise DomainError(f"bottom has no inverse under oplus_{n}")
    if n == -1:
        return z + 1j * mp.pi
    if n == 0:
        return -z
    if n < -1:
        return _mp_log(_mp_inverse(n + 1, _mp_exp(z)))
    w = z
    for _ in range(n - 1):
        w = _mp_log(w)
        if w is _MP_BOTTOM:
            raise DomainError(f"inverse at level {n} undefined")
    if w == 0:
        raise DomainError(f"inverse at level {n} undefined (division by zero)")
    out = 1 / w
    for _ in range(n - 1):
        out = _mp_exp(out)
    return out


def _mp_eval(e: Expr, env):
    if isinstance(e, Const):
        if e.value.is_bottom:
            return _MP_BOTTOM
        return mp.mpc(e.value.re, e.value.im)
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, Neg):
        v = _mp_eval(e.arg, env)
        if v is _MP_BOTTOM:
            raise DomainError("negation of bottom")
        return -v
    if isinstance(e, Join):
        return _mp_join(_mp_eval(e.left, env), _mp_eval(e.right, env))
    if isinstance(e, OplusN):
        return _mp_oplus(e.n, _mp_eval(e.left, env), _mp_eval(e.right, env))
    if isinstance(e, InvN):
        return _mp_inverse(e.n, _mp_eval(e.arg, env))
    if isinstance(e, Apply):
        v = _mp_eval(e.arg, env)
        if e.fn == "exp":
            return _mp_exp(v)
        if v is _MP_BOTTOM:
            raise DomainError(f"{e.fn} of bottom")
        if e.fn == "log":
            return _mp_log(v)
        return getattr(mp, e.fn)(v)
    if isinstance(e, (Add, Sub, Mul, Div, Pow)):
        a = _mp_eval(e.left, env)
        b = _mp_eval(e.right, env)
        if a is _MP_BOTTOM or b is _MP_BOTTOM:
            if isinstance(e, Add):
                return _MP_BOTTOM
            if isinstance(e, Sub) and a is _MP_BOTTOM and b is not _MP_BOTTOM:
                return _MP_BOTTOM
            raise DomainError("bottom operand")
        if isinstance(e, Add):
            return a + b
        if isinstance(e, Sub):
            return a - b
        if isinstance(e, Mul):
            return a * b
        if isinstance(e, Div):
            if b == 0:
                raise DomainError("division by zero")
            return a / b
        return mp.power(a, b)
    if isinstance(e, DerivN):
        raise UnsupportedNode("nested derivative operators in limit evaluation")
    raise UnsupportedNode(f"cannot evaluate {e!r}")


@dataclass
class LimitDiagnostics:
    """Record of one limit evaluation: the h path, the quotient iterates,
    and the successive-difference convergence verdict."""

    h_schedule: list[float] = field(default_factory=list)
    iterates: list[JoinComplex] = field(default_factory=list)
    converged: bool = False
    final_delta: float = math.inf

    def to_dict(self):
        return {
            "h_schedule": self.h_schedule,
            "iterates": [
                "bottom" if it.is_bottom else {"re": it.re, "im": it.im}
                for it in self.iterates
            ],
            "converged": self.converged,
            "final_delta": self.final_delta,
        }


@dataclass
class DnResult:
    value: JoinComplex
    method: str
    diagnostics: LimitDiagnostics | None = None


def limit_schedule(n: int) -> list:
    """The h path approaching the level-n identity, obtained by exp/log
    conjugation of the level-0 path."""
    _mp_ctx()
    if n == 0:
        return [mp.mpf(10) ** (-k) for k in range(1, 13)]
    if n >= 1:
        sched = [1 + mp.mpf(10) ** (-k) for k in range(1, 13)]
        for _ in range(n - 1):
            sched = [mp.exp(h) for h in sched]
        return sched
    sched = [mp.mpf(v) for v in (-4, -8, -16, -32, -64)]
    for _ in range(-n - 1):
        sched = [mp.log(h) for h in sched]
    return sched


def _is_bottomish(q, n: int) -> bool:
    if q is _MP_BOTTOM:
        return True
    return n <= -1 and mp.re(q) < _BOTTOM_FLOOR


def n_derivative_limit(
    n: int,
    f: Expr,
    z,
    tol: float = 1e-6,
    schedule=None,
    var: str | None = None,
    policy: BranchPolicy = BranchPolicy.PRINCIPAL,
    bounds=None,
) -> DnResult:
    """Evaluate the generalized difference quotient along an h schedule.

    Returns the last iterate and diagnostics; iterates of a join-level
    derivative that dive below the bottom floor are reported as bottom
    (the quotient diverging to the join identity).
    """
    check_level(n, bounds)
    check_level(n + 1, bounds)
    _mp_ctx()
    z = jc(z)
    var = var if var is not None else deriv_var(f)
    if schedule is None:
        schedule = limit_schedule(n)
    else:
        schedule = [mp.mpmathify(h) for h in schedule]

    zmp = mp.mpc(z.re, z.im)
    fz = _mp_eval(f, {var: zmp})
    inv_fz = _mp_inverse(n, fz)

    diag = LimitDiagnostics()
    prev = None
    for h in schedule:
        zh = _mp_oplus(n, zmp, h)
        num = _mp_oplus(n, _mp_eval(f, {var: zh}), inv_fz)
        q = _mp_oplus(n + 1, num, _mp_inverse(n + 1, h))
        diag.h_schedule.append(float(mp.re(h)))
        if _is_bottomish(q, n):
            diag.iterates.append(BOTTOM)
        else:
            diag.iterates.append(canonicalize(jc(complex(q))))
        if prev is not None:
            p_bot = _is_bottomish(prev, n)
            q_bot = _is_bottomish(q, n)
            if p_bot and q_bot:
                diag.converged = True
                diag.final_delta = 0.0
            elif not p_bot and not q_bot:
                # Relative delta, so large-magnitude derivatives converge too.
                diag.final_delta = float(abs(q - prev) / max(1, abs(q)))
                diag.converged = diag.final_delta < tol
            else:
                diag.converged = False
                diag.final_delta = math.inf
            if diag.converged:
                prev = q
                break
        prev = q

    value = diag.iterates[-1]
    return DnResult(value=value, method="limit", diagnostics=diag)


def n_derivative(
    n: int,
    f: Expr,
    z,
    var: str | None = None,
    policy: BranchPolicy = BranchPolicy.PRINCIPAL,
    tol: float = 1e-6,
) -> JoinComplex:
    """Closed form where available (n <= 1), otherwise the limit method."""
    if n <= 1:
        return n_derivative_closed(n, f, z, var=var, policy=policy)
    res = n_derivative_limit(n, f, z, tol=tol, var=var, policy=policy)
    if not res.diagnostics.converged:
        raise NoConvergence(f"limit method did not converge for level {n}", res.diagnostics)
    return res.value


# --- partial derivatives of the join ---------------------------------------


def join_partials(x: float, y: float) -> tuple[float, float]:
    """(d/dx, d/dy) of x v y: the softmax pair, computed stably."""
    d = x - y
    if d >= 0:
        px = 1.0 / (1.0 + math.exp(-d)) if d < 745 else 1.0
        return px, 1.0 - px
    py = 1.0 / (1.0 + math.exp(d)) if d > -745 else 1.0
    return 1.0 - py, py


def join_of_partials(f: Expr, x: float, y: float, varx: str = "x", vary: str = "y") -> float:
    """join(df/dx, df/dy) at (x, y), partials taken symbolically."""
    env = {varx: x, vary: y}
    fx = eval_expr(classic_derivative(f, varx), env, "real")
    fy = eval_expr(classic_derivative(f, vary), env, "real")
    return join(fx, fy)
