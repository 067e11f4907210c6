#!/usr/bin/env python3
"""Probe how x oplus_n y approaches max(x, y) as n decreases.

Prints, for a grid of operand pairs, the gap (x oplus_n y) - max(x, y)
at levels n = -1 down to a chosen floor.  On nonnegative pairs with a
clear separation the gap shrinks monotonically toward zero.
"""

import argparse
import random

from opchain import oplus


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pairs", type=int, default=8)
    ap.add_argument("--floor", type=int, default=-4, help="deepest level to probe")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    levels = list(range(-1, args.floor - 1, -1))
    header = "      x       y   " + "  ".join(f"gap(n={n})" for n in levels)
    print(header)
    print("-" * len(header))
    for _ in range(args.pairs):
        x = rng.uniform(0.0, 3.0)
        y = max(0.0, min(3.0, x + rng.choice([-1, 1]) * rng.uniform(0.5, 2.0)))
        gaps = [oplus(n, x, y, bounds=(args.floor, 4)) - max(x, y) for n in levels]
        cells = "  ".join(f"{g:8.2e}" for g in gaps)
        mono = all(gaps[i] >= gaps[i + 1] for i in range(len(gaps) - 1))
        print(f"{x:7.3f} {y:7.3f}   {cells}  {'monotone' if mono else 'NOT monotone'}")


if __name__ == "__main__":
    main()
