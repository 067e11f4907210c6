"""The graded family of arithmetic operations oplus_n.

Level 0 is ordinary addition, level 1 multiplication, level -1 the
join x v y = ln(e^x + e^y).  Adjacent levels are conjugate under
exp/log, which is how both the real and the complex implementations
walk the chain.  Levels are plain ints validated against configurable
bounds.
"""

from __future__ import annotations

import cmath
import math

from .errors import DomainError, LevelBoundsError, NoIdentity, NoInverse, UndefinedForm
from .numtower import (
    BOTTOM,
    BranchPolicy,
    JoinComplex,
    NEG_INF,
    POS_INF,
    _check_real,
    canonicalize,
    cx_exp,
    cx_log,
    ext_exp,
    ext_log,
)

DEFAULT_LEVEL_BOUNDS = (-4, 4)

# Above this, exp overflows binary64 and the deep-level correction terms
# are below one ulp, so oplus_n collapses to max for n <= -2.
_EXP_SAFE = 700.0

# Relative cancellation threshold below which a complex join snaps to
# bottom (makes z v (z + i*pi) exactly bottom in binary64).
BOTTOM_SNAP = 1e-12


def check_level(n: int, bounds: tuple[int, int] | None = None) -> int:
    if not isinstance(n, int) or isinstance(n, bool):
        raise LevelBoundsError(f"operation level must be an int, got {n!r}")
    lo, hi = bounds if bounds is not None else DEFAULT_LEVEL_BOUNDS
    if not lo <= n <= hi:
        raise LevelBoundsError(f"operation level {n} outside bounds [{lo}, {hi}]")
    return n


def join(x: float, y: float) -> float:
    """x v y = ln(e^x + e^y), computed stably for any magnitude."""
    x = _check_real(x)
    y = _check_real(y)
    if x == POS_INF or y == POS_INF:
        return POS_INF
    if x == NEG_INF:
        return y
    if y == NEG_INF:
        return x
    hi, lo = (x, y) if x >= y else (y, x)
    return hi + math.log1p(math.exp(lo - hi))


def oplus(n: int, x: float, y: float, bounds: tuple[int, int] | None = None) -> float:
    """The real-mode operation x oplus_n y."""
    check_level(n, bounds)
    x = _check_real(x)
    y = _check_real(y)
    if n == 0:
        if (x == POS_INF and y == NEG_INF) or (x == NEG_INF and y == POS_INF):
            raise UndefinedForm("inf - inf is not defined")
        return x + y
    if n == -1:
        return join(x, y)
    if n < -1:
        m = max(x, y)
        if m > _EXP_SAFE:
            return m
        return ext_log(oplus(n + 1, ext_exp(x), ext_exp(y), bounds))
    return ext_exp(oplus(n - 1, ext_log(x), ext_log(y), bounds))


def nfold_join(k: int, x: float) -> float:
    """The k-fold join x v ... v x, which collapses to ln(k) + x."""
    if not isinstance(k, int) or k < 1:
        raise DomainError(f"n-fold join needs a positive integer count, got {k!r}")
    return math.log(k) + _check_real(x)


def identity(n: int, bounds: tuple[int, int] | None = None) -> float:
    """Identity element of oplus_n: exp^(n)(0) for n >= 0, -inf for n = -1."""
    check_level(n, bounds)
    if n == -1:
        return NEG_INF
    if n < -1:
        raise NoIdentity(f"oplus_{n} has no identity in the extended reals")
    v = 0.0
    for _ in range(n):
        v = ext_exp(v)
    return v


def inverse(n: int, x: float, bounds: tuple[int, int] | None = None) -> float:
    """Inverse of x under oplus_n: exp^(n-1)[1 / ln^(n-1)(x)] for n >= 1."""
    check_level(n, bounds)
    x = _check_real(x)
    if n == 0:
        return -x
    if n == -1:
        raise NoInverse("the join has no inverse in the reals; use cx_inverse")
    if n < -1:
        raise NoInverse(f"oplus_{n} has no real inverse")
    w = x
    for _ in range(n - 1):
        w = ext_log(w)
    if w == 0.0:
        raise DomainError(f"inverse at level {n} undefined at x = {x} (division by zero)")
    if w == NEG_INF or w == POS_INF:
        raise DomainError(f"inverse at level {n} undefined at x = {x}")
    r = 1.0 / w
    for _ in range(n - 1):
        r = ext_exp(r)
    return r


def cx_join(
    z: JoinComplex, w: JoinComplex, policy: BranchPolicy = BranchPolicy.PRINCIPAL
) -> JoinComplex:
    """Complex join log(e^z + e^w); bottom is the identity.

    Near-total cancellation (relative magnitude below BOTTOM_SNAP)
    collapses to bottom, so z v (z + i*pi) is exactly bottom.
    """
    if z.is_bottom:
        return w
    if w.is_bottom:
        return z
    m = max(z.re, w.re)
    s = cmath.exp(z.z - m) + cmath.exp(w.z - m)
    if abs(s) < BOTTOM_SNAP:
        return BOTTOM
    r = cmath.log(s)
    return canonicalize(JoinComplex(m + r.real, r.imag))


def cx_oplus(
    n: int,
    z: JoinComplex,
    w: JoinComplex,
    policy: BranchPolicy = BranchPolicy.PRINCIPAL,
    bounds: tuple[int, int] | None = None,
) -> JoinComplex:
    """Complex-mode z oplus_n w, walking the chain via cx_exp/cx_log."""
    check_level(n, bounds)
    if n == 0:
        if z.is_bottom or w.is_bottom:
            return BOTTOM
        return JoinComplex(z.re + w.re, z.im + w.im)
    if n == -1:
        return cx_join(z, w, policy)
    if n < -1:
        r = cx_oplus(n + 1, cx_exp(z), cx_exp(w), policy, bounds)
        if r.is_bottom:
            raise DomainError(f"oplus_{n} undefined: intermediate log of bottom")
        return cx_log(r, policy)
    return cx_exp(cx_oplus(n - 1, cx_log(z, policy), cx_log(w, policy), policy, bounds))


def cx_identity(n: int, bounds: tuple[int, int] | None = None) -> JoinComplex:
    check_level(n, bounds)
    if n == -1:
        return BOTTOM
    if n < -1:
        raise NoIdentity(f"oplus_{n} has no identity")
    v = JoinComplex(0.0, 0.0)
    for _ in range(n):
        v = cx_exp(v)
    return v


def cx_inverse(
    n: int,
    z: JoinComplex,
    policy: BranchPolicy = BranchPolicy.PRINCIPAL,
    bounds: tuple[int, int] | None = None,
) -> JoinComplex:
    """Inverse of z under the complex oplus_n; join inverse is z + i*pi.

    Levels below -1 are obtained by log-conjugating the level above,
    which the limit-definition derivatives rely on.
    """
    check_level(n, bounds)
    if n == -1:
        if z.is_bottom:
            return BOTTOM
        return canonicalize(JoinComplex(z.re, z.im + math.pi))
    if z.is_bottom:
        raise DomainError(f"bottom has no inverse under oplus_{n}")
    if n == 0:
        return JoinComplex(-z.re, -z.im)
    if n < -1:
        return cx_log(cx_inverse(n + 1, cx_exp(z), policy, bounds), policy)
    w = z
    for _ in range(n - 1):
        w = cx_log(w, policy)
        if w.is_bottom:
            raise DomainError(f"inverse at level {n} undefined at {z!r}")
    if w.re == 0.0 and w.im == 0.0:
        raise DomainError(f"inverse at level {n} undefined at {z!r} (division by zero)")
    r = 1.0 / w.z
    out = JoinComplex(r.real, r.imag)
    for _ in range(n - 1):
        out = cx_exp(out)
    return out
