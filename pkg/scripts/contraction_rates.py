#!/usr/bin/env python3
"""Measure observed contraction against the guaranteed rates for the three
refinement schemes and the intersection-property lift."""

import argparse
from fractions import Fraction as F

from hyperball.barycenter import (
    exact_box_ip_oracle,
    ip_constants,
    ip_lift,
    linf_backend,
)
from hyperball.lab import LinfBallFamily
from hyperball.linf import Ball, Box, linf_dist
from hyperball.lp import halfspace
from hyperball.refine import (
    almost_to_exact,
    chain_walk,
    exact_subset_oracle,
    saturating_subset_oracle,
    triple_intersection,
)
from hyperball.rng import SplitMix64


def show(title, observed, bounds):
    print(f"\n{title}")
    print(f"{'step':>5} {'observed':>14} {'bound':>14}")
    for i, (o, b) in enumerate(zip(observed, bounds)):
        print(f"{i:>5} {float(o):>14.3e} {float(b):>14.3e}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rounds", type=int, default=12)
    parser.add_argument("--seed", type=int, default=424242)
    args = parser.parse_args()

    box = Box((F(0), F(0)), (F(2), F(2)))
    family = LinfBallFamily((Ball((F(3), F(1)), F(2)), Ball((F(-1), F(1)), F(2))), box)
    _, trace = almost_to_exact(
        saturating_subset_oracle(box), family, iterations=args.rounds
    )
    show(
        "halving-slack steps vs 2^-k + 2^-(k+1)",
        trace.steps,
        [F(1, 1 << (k + 1)) + F(1, 1 << (k + 2)) for k in range(len(trace.steps))],
    )

    a0 = Box((F(4), F(0)), (F(6), F(2)))
    a1 = Box((F(0), F(0)), (F(5), F(1)))
    a2 = Box((F(0), F(1)), (F(5), F(3)))
    _, report = triple_intersection(
        exact_subset_oracle(a0), exact_subset_oracle(a1), exact_subset_oracle(a2),
        (F(0), F(1)), rounds=args.rounds,
    )
    show(
        "distance to the third set vs (3/4)^n r0",
        report.observed,
        report.bounds,
    )

    result = chain_walk(
        saturating_subset_oracle(halfspace([-1, 0], 0)),
        saturating_subset_oracle(halfspace([0, -1], 0)),
        (F(-3), F(-3)), F(3), (F(2), F(2)), F(1, 2), F(1, 4),
        rounds=5,
        ambient=exact_subset_oracle(Box((F(-50), F(-50)), (F(50), F(50))), level=3),
    )
    show(
        "chain-walk pair gap vs eps/2^n",
        [rec["pair_gap"] for rec in result.rounds],
        [rec["pair_gap_bound"] for rec in result.rounds],
    )

    rng = SplitMix64(args.seed)
    anchor = (F(rng.randint(-4, 4)), F(rng.randint(-4, 4)))
    balls = []
    for _ in range(5):
        c = (anchor[0] + F(rng.randint(-40, 40), 8), anchor[1] + F(rng.randint(-40, 40), 8))
        balls.append(Ball(c, linf_dist(c, anchor) + F(rng.randint(0, 8), 8)))
    params = ip_constants(4, 2, F(1, 64))
    _, trace = ip_lift(
        exact_box_ip_oracle, tuple(balls), linf_backend(2), params, rounds=args.rounds
    )
    R = trace.aux["R"]
    show(
        f"ip-lift reach vs c^j R (c = {params.c})",
        trace.slacks,
        [params.c**j * R for j in range(len(trace.slacks))],
    )


if __name__ == "__main__":
    main()
