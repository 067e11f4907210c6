"""Join-algebra combinatorics: the binomial analogue and join polynomials."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError
from .numtower import BOTTOM, BranchPolicy, JoinComplex, NEG_INF, _check_real
from .levels import cx_join, join


def log_binomial(n: int, k: int) -> float:
    """ln C(n, k) via log-gamma, usable far beyond factorial overflow."""
    if not (isinstance(n, int) and isinstance(k, int)):
        raise DomainError("binomial arguments must be integers")
    if not 0 <= k <= n:
        raise DomainError(f"binomial index k={k} outside [0, {n}]")
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def binomial_rhs(n: int, x: float, y: float) -> float:
    """Right-hand side of the join binomial identity for n*(x v y):
    the join over k of ln C(n, k) + (n-k)*x + k*y."""
    if not isinstance(n, int) or n < 1:
        raise DomainError(f"binomial fold needs a positive integer, got {n!r}")
    x = _check_real(x)
    y = _check_real(y)
    acc = NEG_INF
    for k in range(n + 1):
        acc = join(acc, log_binomial(n, k) + (n - k) * x + k * y)
    return acc


@dataclass(frozen=True)
class JoinPolynomial:
    """Coefficients a_0..a_n of the join polynomial V_k (a_k + k*z).

    A bottom coefficient marks an absent term, mirroring a zero
    coefficient in an ordinary polynomial.
    """

    coefficients: tuple[JoinComplex, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(self.coefficients))

    @property
    def degree(self) -> int:
        """Index of the last non-bottom coefficient, or -1 if all absent."""
        for i in range(len(self.coefficients) - 1, -1, -1):
            if not self.coefficients[i].is_bottom:
                return i
        return -1


def poly_eval(
    p: JoinPolynomial, z: JoinComplex, policy: BranchPolicy = BranchPolicy.PRINCIPAL
) -> JoinComplex:
    """Evaluate V_k (a_k + k*z), skipping bottom terms."""
    acc = BOTTOM
    for k, a in enumerate(p.coefficients):
        if a.is_bottom:
            continue
        if z.is_bottom:
            if k == 0:
                term = a
            else:
                continue  # k*z with z = -inf vanishes from the join
        else:
            term = JoinComplex(a.re + k * z.re, a.im + k * z.im)
        acc = cx_join(acc, term, policy)
    return acc
