#!/usr/bin/env python3
"""Report limit-definition derivative convergence against closed forms.

For each level and panel function, evaluates the generalized difference
quotient along its h schedule and prints the iterate trail, the final
successive delta, and the distance to the closed form (where one exists).
"""

import argparse

from opchain import jc
from opchain.calculus import n_derivative_closed, n_derivative_limit
from opchain.expr import parse

PANEL = ["z", "a + z", "z^2", "z^3", "exp(z)", "log(z)"]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--levels", default="-2,-1,0,1")
    ap.add_argument("--at", type=complex, default=0.4 + 0.1j)
    ap.add_argument("--tolerance", type=float, default=1e-6)
    ap.add_argument("--trail", action="store_true", help="print every iterate")
    args = ap.parse_args()

    z = jc(args.at)
    env_a = jc(0.3 - 0.1j)
    for n in (int(s) for s in args.levels.split(",")):
        print(f"== level n = {n}, at z = {args.at} ==")
        for text in PANEL:
            f = parse(text)
            if "a" in text:
                f = parse(text.replace("a", "(0.3 - 0.1*i)"))
            try:
                res = n_derivative_limit(n, f, z, tol=args.tolerance, var="z")
            except Exception as e:  # domain holes in the panel are expected
                print(f"  {text:10s} limit: {type(e).__name__}: {e}")
                continue
            d = res.diagnostics
            try:
                closed = n_derivative_closed(n, f, z, var="z")
                if closed.is_bottom or res.value.is_bottom:
                    dist = "both bottom" if closed.is_bottom == res.value.is_bottom else "MISMATCH"
                else:
                    dist = f"{abs(closed.z - res.value.z):.2e}"
            except Exception as e:
                dist = f"closed: {type(e).__name__}"
            print(
                f"  {text:10s} value={res.value!r:48s} converged={d.converged} "
                f"delta={d.final_delta:.2e} dist={dist}"
            )
            if args.trail:
                for h, it in zip(d.h_schedule, d.iterates):
                    print(f"      h={h:<12.4g} {it!r}")
        print()
    print(f"(a = {env_a!r} wherever the panel mentions a)")


if __name__ == "__main__":
    main()
