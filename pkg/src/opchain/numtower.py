"""Extended numeric carriers and the exp/log primitives.

Real mode works on plain floats extended with +/-inf under the
conventions log(0) = -inf and e^{-inf} = 0.  Complex mode works on
``JoinComplex``: the complex plane with a single adjoined bottom
element (-inf), which is the identity for the join and absorbing
for ordinary addition.  NaN is rejected everywhere.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

from .errors import DomainError

NEG_INF = float("-inf")
POS_INF = float("inf")

# Default comparison tolerances used by the property suites.
ABS_TOL = 1e-12
REL_TOL = 1e-9


class BranchPolicy(Enum):
    """How complex-logarithm branches are handled.

    PRINCIPAL canonicalizes every log to imaginary part in (-pi, pi].
    MOD_2PI additionally treats values differing by an integer
    multiple of 2*pi*i as equal in comparisons.
    """

    PRINCIPAL = "principal"
    MOD_2PI = "modulo-2pi-equivalence"


def _check_real(x: float) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise DomainError(f"expected a real number, got {x!r}")
    x = float(x)
    if math.isnan(x):
        raise DomainError("NaN is not a member of the extended reals")
    return x


@dataclass(frozen=True)
class JoinComplex:
    """An element of C with a single bottom (-inf) adjoined."""

    re: float = 0.0
    im: float = 0.0
    bottom: bool = False

    def __post_init__(self):
        if self.bottom:
            if self.re != 0.0 or self.im != 0.0:
                raise DomainError("bottom carries no finite components")
        else:
            if not (math.isfinite(self.re) and math.isfinite(self.im)):
                raise DomainError(
                    f"JoinComplex components must be finite, got {self.re}, {self.im}"
                )

    @property
    def is_bottom(self) -> bool:
        return self.bottom

    @property
    def z(self) -> complex:
        if self.bottom:
            raise DomainError("bottom has no complex value")
        return complex(self.re, self.im)

    def __repr__(self):
        if self.bottom:
            return "BOTTOM"
        return f"JoinComplex({self.re!r}, {self.im!r})"


BOTTOM = JoinComplex(bottom=True)


def jc(value) -> JoinComplex:
    """Coerce a complex/float/JoinComplex into a JoinComplex."""
    if isinstance(value, JoinComplex):
        return value
    value = complex(value)
    if math.isnan(value.real) or math.isnan(value.imag):
        raise DomainError("NaN component")
    if value.real == NEG_INF and value.imag == 0.0:
        return BOTTOM
    return JoinComplex(value.real, value.imag)


def ext_exp(x: float) -> float:
    """exp on the extended reals: e^{-inf} = 0, e^{+inf} = +inf."""
    x = _check_real(x)
    if x == NEG_INF:
        return 0.0
    if x == POS_INF:
        return POS_INF
    try:
        return math.exp(x)
    except OverflowError:
        return POS_INF


def ext_log(x: float) -> float:
    """log on the nonnegative extended reals: log(0) = -inf."""
    x = _check_real(x)
    if x == POS_INF:
        return POS_INF
    if x < 0.0 or x == NEG_INF:
        raise DomainError(f"log of negative extended real {x}")
    if x == 0.0:
        return NEG_INF
    return math.log(x)


def canonicalize(z: JoinComplex) -> JoinComplex:
    """Reduce the imaginary part mod 2*pi into (-pi, pi]; bottom is fixed."""
    if z.is_bottom:
        return z
    im = math.remainder(z.im, 2.0 * math.pi)
    if im <= -math.pi:
        im += 2.0 * math.pi
    return JoinComplex(z.re, im)


def cx_exp(z: JoinComplex) -> JoinComplex:
    """Complex exponential; bottom maps to complex zero."""
    if z.is_bottom:
        return JoinComplex(0.0, 0.0)
    try:
        w = cmath.exp(z.z)
    except OverflowError:
        raise DomainError(f"complex exp overflow at {z!r}") from None
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        raise DomainError(f"complex exp overflow at {z!r}")
    return JoinComplex(w.real, w.imag)


def cx_log(z: JoinComplex, policy: BranchPolicy = BranchPolicy.PRINCIPAL) -> JoinComplex:
    """Complex logarithm; zero maps to bottom, never an error."""
    if z.is_bottom:
        raise DomainError("log of bottom is undefined")
    if z.re == 0.0 and z.im == 0.0:
        return BOTTOM
    w = cmath.log(z.z)
    return canonicalize(JoinComplex(w.real, w.imag))


def real_close(a: float, b: float, rel: float = REL_TOL, abs_tol: float = ABS_TOL) -> bool:
    """Tolerant comparison on the extended reals (exact at +/-inf)."""
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= max(abs_tol, rel * max(abs(a), abs(b)))


def cx_close(
    a: JoinComplex,
    b: JoinComplex,
    rel: float = REL_TOL,
    abs_tol: float = ABS_TOL,
    policy: BranchPolicy = BranchPolicy.PRINCIPAL,
) -> bool:
    """Tolerant comparison on JoinComplex, optionally modulo 2*pi*i."""
    if a.is_bottom or b.is_bottom:
        return a.is_bottom and b.is_bottom
    d = a.z - b.z
    if policy is BranchPolicy.MOD_2PI:
        k = round(d.imag / (2.0 * math.pi))
        d -= complex(0.0, 2.0 * math.pi * k)
    scale = max(abs(a.z), abs(b.z))
    return abs(d) <= max(abs_tol, rel * scale)
