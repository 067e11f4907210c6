"""Graded chain of arithmetic operations, the join algebra, and
generalized n-derivatives, over the extended reals and over the
complex plane with an adjoined bottom element."""

from .errors import (
    DomainError,
    LevelBoundsError,
    NoConvergence,
    NoIdentity,
    NoInverse,
    OpchainError,
    UndefinedForm,
    Unsupported,
    UnsupportedNode,
    UnboundVariable,
)
from .numtower import (
    ABS_TOL,
    BOTTOM,
    BranchPolicy,
    JoinComplex,
    NEG_INF,
    POS_INF,
    REL_TOL,
    canonicalize,
    cx_close,
    cx_exp,
    cx_log,
    ext_exp,
    ext_log,
    jc,
    real_close,
)
from .levels import (
    DEFAULT_LEVEL_BOUNDS,
    check_level,
    cx_identity,
    cx_inverse,
    cx_join,
    cx_oplus,
    identity,
    inverse,
    join,
    nfold_join,
    oplus,
)
from .joinalg import JoinPolynomial, binomial_rhs, log_binomial, poly_eval
from .expr import ParseError, eval_expr, free_vars, parse, print_expr
from .calculus import (
    DnResult,
    LimitDiagnostics,
    classic_derivative,
    join_of_partials,
    join_partials,
    n_derivative,
    n_derivative_closed,
    n_derivative_limit,
    repeat_vee_derivative,
    vee_derivative,
)

__version__ = "0.1.0"

__all__ = [
    "ABS_TOL",
    "BOTTOM",
    "BranchPolicy",
    "DEFAULT_LEVEL_BOUNDS",
    "DnResult",
    "DomainError",
    "JoinComplex",
    "JoinPolynomial",
    "LevelBoundsError",
    "LimitDiagnostics",
    "NEG_INF",
    "NoConvergence",
    "NoIdentity",
    "NoInverse",
    "OpchainError",
    "POS_INF",
    "ParseError",
    "REL_TOL",
    "UnboundVariable",
    "UndefinedForm",
    "Unsupported",
    "UnsupportedNode",
    "binomial_rhs",
    "canonicalize",
    "check_level",
    "classic_derivative",
    "cx_close",
    "cx_exp",
    "cx_identity",
    "cx_inverse",
    "cx_join",
    "cx_log",
    "cx_oplus",
    "eval_expr",
    "ext_exp",
    "ext_log",
    "free_vars",
    "identity",
    "inverse",
    "jc",
    "join",
    "join_of_partials",
    "join_partials",
    "log_binomial",
    "n_derivative",
    "n_derivative_closed",
    "n_derivative_limit",
    "nfold_join",
    "oplus",
    "parse",
    "poly_eval",
    "print_expr",
    "real_close",
    "repeat_vee_derivative",
    "vee_derivative",
]
