"""Command-line front end: eval, diff, table, verify, repl.

Exit codes: 0 success, 1 verify failure, 2 parse error, 3 domain
error, 4 no-convergence.  JSON output carries a top-level "value"
(object {re, im} or the string "bottom"), optional "diagnostics",
and "error" on failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re as _re
import sys
from dataclasses import dataclass

from .errors import NoConvergence, OpchainError
from .numtower import BOTTOM, BranchPolicy, JoinComplex, NEG_INF, POS_INF, jc
from .levels import DEFAULT_LEVEL_BOUNDS, identity, check_level
from .expr import ParseError, parse, eval_expr
from . import calculus
from .verify import SUITES, run_suites

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_PARSE = 2
EXIT_DOMAIN = 3
EXIT_NO_CONVERGENCE = 4

_BRANCHES = {"principal": BranchPolicy.PRINCIPAL, "mod2pi": BranchPolicy.MOD_2PI}


@dataclass
class CliConfig:
    mode: str = "complex"
    branch: BranchPolicy = BranchPolicy.PRINCIPAL
    format: str = "text"
    tolerance: float = 1e-6
    seed: int = 0
    level_bounds: tuple[int, int] = DEFAULT_LEVEL_BOUNDS

    def __post_init__(self):
        if self.mode not in ("real", "complex"):
            raise ValueError(f"mode must be real or complex, got {self.mode!r}")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        lo, hi = self.level_bounds
        if not (-8 <= lo <= hi <= 8):
            raise ValueError(f"level bounds {self.level_bounds} outside [-8, 8]")


def level_bounds_from_env(environ=None) -> tuple[int, int]:
    env = os.environ if environ is None else environ
    raw = env.get("OPCHAIN_LEVEL_BOUNDS")
    if not raw:
        return DEFAULT_LEVEL_BOUNDS
    try:
        lo, hi = (int(p) for p in raw.split(","))
    except ValueError:
        raise ValueError(f"OPCHAIN_LEVEL_BOUNDS must be 'lo,hi', got {raw!r}") from None
    return (lo, hi)


# --- literals and value formatting ------------------------------------------

_NUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"


def parse_complex_literal(text: str) -> JoinComplex:
    """Parse a+bi / bi / i / -inf / plain real into a JoinComplex."""
    t = text.strip().replace(" ", "")
    if t in ("-inf", "bottom"):
        return BOTTOM
    m = _re.fullmatch(rf"[+-]?{_NUM}", t)
    if m:
        return jc(float(t))
    m = _re.fullmatch(rf"([+-]?{_NUM})([+-](?:{_NUM})?)i", t)
    if m:
        im = m.group(2)
        return JoinComplex(float(m.group(1)), float(im) if im not in ("+", "-") else float(im + "1"))
    m = _re.fullmatch(rf"([+-]?(?:{_NUM})?)i", t)
    if m:
        im = m.group(1)
        return JoinComplex(0.0, float(im) if im not in ("", "+", "-") else float(im + "1"))
    raise ParseError(0, "complex literal (a+bi, bi, i, -inf, or a real)", text)


def _format_value_text(v) -> str:
    if isinstance(v, JoinComplex):
        if v.is_bottom:
            return "-inf"
        if v.im == 0.0:
            return repr(v.re)
        sign = "+" if v.im >= 0 else "-"
        return f"{v.re!r}{sign}{abs(v.im)!r}i"
    if v == NEG_INF:
        return "-inf"
    if v == POS_INF:
        return "inf"
    return repr(float(v))


def _value_json(v):
    if isinstance(v, JoinComplex):
        if v.is_bottom:
            return "bottom"
        return {"re": v.re, "im": v.im}
    if v == NEG_INF:
        return "bottom"
    if v == POS_INF:
        return "inf"
    return {"re": float(v), "im": 0.0}


def _emit(payload: dict, text: str, config: CliConfig, out) -> None:
    if config.format == "json":
        print(json.dumps(payload), file=out)
    else:
        print(text, file=out)


def _fail(exc: Exception, code: int, config: CliConfig, out, err) -> int:
    msg = f"{type(exc).__name__}: {exc}"
    if config.format == "json":
        print(json.dumps({"error": msg}), file=out)
    else:
        print(msg, file=err)
    return code


def _parse_bindings(bindings, mode: str) -> dict:
    env = {}
    for item in bindings or ():
        name, eq, raw = item.partition("=")
        name = name.strip()
        if not eq or not name.isidentifier():
            raise ParseError(0, "binding of the form name=value", item)
        v = parse_complex_literal(raw)
        env[name] = _demote_binding(v) if mode == "real" else v
    return env


def _demote_binding(v: JoinComplex) -> float:
    if v.is_bottom:
        return NEG_INF
    if v.im != 0.0:
        raise OpchainError(f"binding {v!r} is not real; use --mode complex")
    return v.re


# --- commands ---------------------------------------------------------------


def cmd_eval(expr: str, bindings, config: CliConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        tree = parse(expr)
        env = _parse_bindings(bindings, config.mode)
    except ParseError as e:
        return _fail(e, EXIT_PARSE, config, out, err)
    except OpchainError as e:
        return _fail(e, EXIT_DOMAIN, config, out, err)
    try:
        v = eval_expr(tree, env, config.mode, config.branch, config.level_bounds)
    except OpchainError as e:
        return _fail(e, EXIT_DOMAIN, config, out, err)
    _emit({"value": _value_json(v), "mode": config.mode}, _format_value_text(v), config, out)
    return EXIT_OK


def cmd_diff(n: int, expr: str, at: str, method: str, config: CliConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        tree = parse(expr)
        z = parse_complex_literal(at)
    except ParseError as e:
        return _fail(e, EXIT_PARSE, config, out, err)
    try:
        check_level(n, config.level_bounds)
        payload: dict = {}
        lines = []
        closed = limit = None
        if method in ("closed", "both"):
            closed = calculus.n_derivative_closed(n, tree, z, policy=config.branch)
            payload["value"] = _value_json(closed)
            lines.append(f"closed: {_format_value_text(closed)}")
        if method in ("limit", "both"):
            res = calculus.n_derivative_limit(
                n, tree, z, tol=config.tolerance, policy=config.branch, bounds=config.level_bounds
            )
            limit = res.value
            payload.setdefault("value", _value_json(limit))
            payload["limit"] = _value_json(limit)
            payload["diagnostics"] = res.diagnostics.to_dict()
            lines.append(f"limit:  {_format_value_text(limit)}")
            if not res.diagnostics.converged:
                raise NoConvergence(
                    f"limit method did not converge at level {n}", res.diagnostics
                )
        if method == "both":
            if closed.is_bottom or limit.is_bottom:
                dist = 0.0 if closed.is_bottom == limit.is_bottom else math.inf
            else:
                dist = abs(closed.z - limit.z)
            payload["distance"] = dist
            lines.append(f"distance: {dist!r}")
        if method != "both":
            lines = [_format_value_text(closed if method == "closed" else limit)]
        _emit(payload, "\n".join(lines), config, out)
        return EXIT_OK
    except NoConvergence as e:
        if config.format == "json":
            body = {"error": str(e)}
            if e.diagnostics is not None:
                body["diagnostics"] = e.diagnostics.to_dict()
            print(json.dumps(body), file=out)
        else:
            print(f"NoConvergence: {e}", file=err)
            if e.diagnostics is not None:
                print(f"h_schedule: {e.diagnostics.h_schedule}", file=err)
                print(f"final_delta: {e.diagnostics.final_delta}", file=err)
        return EXIT_NO_CONVERGENCE
    except OpchainError as e:
        return _fail(e, EXIT_DOMAIN, config, out, err)


_IDENTITY_LABELS = {-1: "-inf", 0: "0", 1: "1", 2: "e", 3: "e^e"}
_NOTATION = {-1: "x v y (log-sum-exp)", 0: "x + y", 1: "x * y", 2: "exp(ln x * ln y)"}


def _inverse_label(n: int) -> str:
    if n < -1:
        return "none"
    if n == -1:
        return "complex only: z + i*pi"
    if n == 0:
        return "-x"
    if n == 1:
        return "1/x"
    if n == 2:
        return "exp(1/ln x)"
    return f"exp^({n - 1})(1/ln^({n - 1}) x)"


def cmd_table(levels: str, config: CliConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        lo, hi = (int(p) for p in levels.replace(":", ",").split(","))
        check_level(lo, config.level_bounds)
        check_level(hi, config.level_bounds)
    except (ValueError, OpchainError) as e:
        return _fail(e, EXIT_DOMAIN, config, out, err)
    rows = []
    for n in range(lo, hi + 1):
        if n <= -2:
            ident = "none (see docs)"
        elif n in _IDENTITY_LABELS:
            ident = _IDENTITY_LABELS[n]
        else:
            ident = repr(identity(n, config.level_bounds))
        rows.append(
            {
                "level": n,
                "notation": _NOTATION.get(n, f"oplus_{n}"),
                "identity": ident,
                "inverse": _inverse_label(n),
            }
        )
    if config.format == "json":
        print(json.dumps({"table": rows}), file=out)
    else:
        print(f"{'n':>3}  {'operation':<22} {'identity':<16} inverse", file=out)
        for r in rows:
            print(
                f"{r['level']:>3}  {r['notation']:<22} {r['identity']:<16} {r['inverse']}",
                file=out,
            )
    return EXIT_OK


def cmd_verify(suite: str, samples: int, config: CliConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        reports = run_suites(suite, samples=samples, seed=config.seed)
    except KeyError as e:
        return _fail(e, EXIT_DOMAIN, config, out, err)
    ok = all(r.ok for r in reports)
    if config.format == "json":
        print(
            json.dumps(
                {
                    "ok": ok,
                    "reports": [
                        {
                            "name": r.name,
                            "total": r.total,
                            "failures": r.failures,
                            "worst_error": r.worst_error,
                            "notes": r.notes,
                        }
                        for r in reports
                    ],
                }
            ),
            file=out,
        )
    else:
        for r in reports:
            status = "PASS" if r.ok else "FAIL"
            line = f"{status} {r.name}: {r.total - r.failures}/{r.total} worst={r.worst_error:.3e}"
            if r.notes:
                line += f"  [{'; '.join(r.notes)}]"
            print(line, file=out)
        print("all suites passed" if ok else "FAILURES detected", file=out)
    return EXIT_OK if ok else EXIT_VERIFY_FAIL


def cmd_repl(config: CliConfig, stdin=None, stdout=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    env: dict = {}
    mode = config.mode
    branch = config.branch
    print("opchain repl; :quit to exit", file=stdout)
    while True:
        print("> ", end="", file=stdout, flush=True)
        line = stdin.readline()
        if not line:
            break
        line = line.strip()
        if not line:
            continue
        try:
            if line == ":quit":
                break
            if line.startswith(":mode"):
                arg = line.split(None, 1)[1] if " " in line else ""
                if arg not in ("real", "complex"):
                    print("usage: :mode real|complex", file=stdout)
                    continue
                mode = arg
                env = {}
                print(f"mode = {mode}", file=stdout)
                continue
            if line.startswith(":branch"):
                arg = line.split(None, 1)[1] if " " in line else ""
                if arg not in _BRANCHES:
                    print("usage: :branch principal|mod2pi", file=stdout)
                    continue
                branch = _BRANCHES[arg]
                print(f"branch = {arg}", file=stdout)
                continue
            if line.startswith(":let"):
                body = line[4:]
                name, eq, rhs = body.partition("=")
                name = name.strip()
                if not eq or not name.isidentifier():
                    print("usage: :let name = expr", file=stdout)
                    continue
                v = eval_expr(parse(rhs), env, mode, branch, config.level_bounds)
                env[name] = v
                print(f"{name} = {_format_value_text(v)}", file=stdout)
                continue
            if line.startswith(":"):
                print(f"unknown directive {line.split()[0]!r}", file=stdout)
                continue
            v = eval_expr(parse(line), env, mode, branch, config.level_bounds)
            print(_format_value_text(v), file=stdout)
        except (OpchainError, ParseError) as e:
            print(f"{type(e).__name__}: {e}", file=stdout)
    return EXIT_OK


# --- argument parsing -------------------------------------------------------


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=("real", "complex"), default="complex")
    p.add_argument("--branch", choices=tuple(_BRANCHES), default="principal")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opchain",
        description="Graded arithmetic chain: joins, the operation tower, and n-derivatives.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate an expression")
    _common_flags(p)
    p.add_argument("expr")
    p.add_argument("--bind", action="append", metavar="name=value", default=[])

    p = sub.add_parser("diff", help="n-derivative of an expression at a point")
    _common_flags(p)
    p.add_argument("-n", type=int, required=True, dest="level")
    p.add_argument("expr")
    p.add_argument("--at", required=True)
    p.add_argument("--method", choices=("closed", "limit", "both"), default="closed")

    p = sub.add_parser("table", help="print the per-level operations table")
    _common_flags(p)
    p.add_argument("--levels", default="-2:3", help="range lo:hi")

    p = sub.add_parser("verify", help="run randomized property suites")
    _common_flags(p)
    p.add_argument("--suite", choices=tuple(SUITES) + ("all",), default="all")
    p.add_argument("--samples", type=int, default=200)

    p = sub.add_parser("repl", help="interactive evaluator")
    _common_flags(p)
    return parser


def config_from_args(args, environ=None) -> CliConfig:
    return CliConfig(
        mode=args.mode,
        branch=_BRANCHES[args.branch],
        format=args.format,
        tolerance=args.tolerance,
        seed=args.seed,
        level_bounds=level_bounds_from_env(environ),
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_PARSE if e.code not in (0, None) else 0
    try:
        config = config_from_args(args)
    except ValueError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    if args.command == "eval":
        return cmd_eval(args.expr, args.bind, config)
    if args.command == "diff":
        return cmd_diff(args.level, args.expr, args.at, args.method, config)
    if args.command == "table":
        return cmd_table(args.levels, config)
    if args.command == "verify":
        return cmd_verify(args.suite, args.samples, config)
    return cmd_repl(config)


if __name__ == "__main__":
    sys.exit(main())
