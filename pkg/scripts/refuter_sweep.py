#!/usr/bin/env python3
"""Sweep the seeded refuter over the standard fixtures and levels 2..6.

Boxes should stay inconclusive at every level (they are externally
hyperconvex); the two-box union falls quickly; half-spaces with diagonal
normals are refutable externally even though they are weakly externally
hyperconvex, and the sweep records at which budget the first certificate
appears."""

import argparse
from fractions import Fraction as F

from hyperball.lab import BoxUnion, refute_search
from hyperball.linf import Box
from hyperball.lp import halfspace


def fixtures():
    unit = Box((F(0), F(0)), (F(1), F(1)))
    slab = Box((F(-2), F(-1)), (F(3), F(5, 2)))
    union = BoxUnion((Box((F(0), F(0)), (F(1), F(1))), Box((F(3), F(0)), (F(4), F(1)))))
    return [
        ("unit box", unit),
        ("slab box", slab),
        ("two-box union", union),
        ("diag half-plane x1+x2<=-1", halfspace([1, 1], -1)),
        ("axis half-plane x2>=0", halfspace([0, -1], 0)),
        ("3d diagonal x1+x2+x3>=0", halfspace([-1, -1, -1], 0)),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--budget", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    print(f"{'fixture':>28} {'level':>6} {'verdict':>14} {'used':>8} {'family':>7}")
    for name, subset in fixtures():
        for level in range(2, 7):
            report = refute_search(subset, level, args.budget, args.seed + level)
            size = len(report.certificate["balls"]) if report.refuted else "-"
            print(
                f"{name:>28} {level:>6} {report.verdict:>14} "
                f"{report.budget_used:>8} {size!s:>7}"
            )


if __name__ == "__main__":
    main()
