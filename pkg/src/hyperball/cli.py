"""Command-line front end.

Exit codes: 0 verdict holds / witness found, 1 refuted, 2 inconclusive,
3 usage or validation error.  Reports echo the full configuration; with the
same seed and inputs the JSON report is byte-identical up to its "timing"
field.  HYPERBALL_THREADS sets the refuter's budget-partition count (the
outcome is partition-invariant by construction).
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction

from . import __version__
from .barycenter import (
    BarycenterConfig,
    barycenter,
    default_ip_eps,
    exact_box_ip_oracle,
    ip_constants,
    ip_lift,
    ip_threshold,
    linf_backend,
)
from .errors import HyperballError
from .io import ParseError, ValidationError, canonical_dumps, parse_instance, to_jsonable
from .lab import (
    LinfBallFamily,
    check_admissible,
    external_witness,
    graph_n_helly_bruteforce,
    helly_counterexample,
    helly_order_check,
    hyperconvex_witness,
    refute_search,
)
from .metric import is_modular
from .rational import RationalParseError, parse_rational
from .refine import exact_subset_oracle, almost_to_exact, triple_intersection, verify_trace
from .reports import HOLDS, INCONCLUSIVE, REFUTED

EXIT_HOLDS = 0
EXIT_REFUTED = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 3

_VERDICT_EXIT = {HOLDS: EXIT_HOLDS, REFUTED: EXIT_REFUTED, INCONCLUSIVE: EXIT_INCONCLUSIVE}


def _report_scaffold(args, command: str) -> dict:
    config = {
        "seed": getattr(args, "seed", None),
        "budget": getattr(args, "budget", None),
        "tau": getattr(args, "tau", None),
        "instance": getattr(args, "instance", None),
    }
    return {
        "tool": "hyperball",
        "version": __version__,
        "command": command,
        "config": config,
        "checks": [],
    }


def _emit(report: dict, args, started: float) -> None:
    report["timing"] = {"seconds": f"{time.monotonic() - started:.6f}"}
    artifact_written = report.pop("_artifact_written", False)
    text = canonical_dumps(report)
    if getattr(args, "out", None) and not artifact_written:
        with open(args.out, "w") as fh:
            fh.write(text)
    if getattr(args, "json", False):
        sys.stdout.write(text)
    else:
        for check in report["checks"]:
            line = f"{check['name']}: {check['verdict']}"
            if "detail" in check:
                line += f"  ({check['detail']})"
            print(line)


def _tau(args) -> Fraction:
    return parse_rational(args.tau) if getattr(args, "tau", None) else Fraction(1, 1 << 30)


def cmd_check(args, report) -> int:
    kind, payload = parse_instance(args.instance)
    if kind in ("metric", "graph"):
        from .io import metric_from_instance

        space = metric_from_instance(kind, payload)
        outcome = is_modular(space)
        report["checks"].append(
            {
                "name": "metric-axioms",
                "verdict": HOLDS,
                "detail": f"{space.size} points validated",
            }
        )
        report["checks"].append(
            {
                "name": "modularity",
                "verdict": outcome.verdict,
                "certificate": to_jsonable(outcome.certificate),
            }
        )
        return _VERDICT_EXIT[outcome.verdict]
    if kind == "polyhedron":
        from .lp import lp_feasible

        result = lp_feasible(payload)
        report["checks"].append(
            {
                "name": "non-emptiness",
                "verdict": HOLDS if result.feasible else REFUTED,
                "certificate": to_jsonable(result.witness or result.certificate),
            }
        )
        return EXIT_HOLDS if result.feasible else EXIT_REFUTED
    if kind == "family":
        family = payload
        adm = check_admissible(family)
        if not adm:
            report["checks"].append(
                {"name": "admissibility", "verdict": REFUTED, "detail": f"{adm.kind} at {adm.indices}"}
            )
            return EXIT_USAGE
        if family.subset is None:
            result = hyperconvex_witness(family)
        else:
            result = external_witness(family.subset, LinfBallFamily(family.balls))
        report["checks"].append(
            {
                "name": "common-point",
                "verdict": HOLDS if result.feasible else REFUTED,
                "certificate": to_jsonable(result.witness if result.feasible else result.certificate),
            }
        )
        return EXIT_HOLDS if result.feasible else EXIT_REFUTED
    if kind == "helly":
        instance = payload
        outcome = helly_order_check(instance.halfspaces, args.k or instance.dim)
        report["checks"].append(
            {"name": "helly-order", "verdict": outcome.verdict, "certificate": to_jsonable(outcome.certificate)}
        )
        return _VERDICT_EXIT[outcome.verdict]
    raise ValidationError(f"check does not support instance kind {kind!r}")


def cmd_refute(args, report) -> int:
    kind, payload = parse_instance(args.instance)
    if kind == "family":
        subset = payload.subset
    elif kind in ("polyhedron", "box"):
        subset = payload
    else:
        raise ValidationError("refute needs a polyhedron, box, or family-with-subset instance")
    outcome = refute_search(subset, args.level, args.budget, args.seed, mode=args.mode)
    report["checks"].append(
        {
            "name": f"refute-level-{args.level}",
            "verdict": outcome.verdict,
            "certificate": to_jsonable(outcome.certificate),
            "budget_used": outcome.budget_used,
            "seed": outcome.seed,
        }
    )
    return _VERDICT_EXIT[outcome.verdict]


def cmd_helly(args, report) -> int:
    instance = helly_counterexample(args.dim)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(canonical_dumps(instance))
        report["_artifact_written"] = True
    exit_code = EXIT_HOLDS
    if args.verify:
        k = args.k or args.dim
        outcome = helly_order_check(instance.halfspaces, k)
        report["checks"].append(
            {
                "name": f"helly-order-{k}",
                "verdict": outcome.verdict,
                "detail": "; ".join(outcome.notes),
            }
        )
        exit_code = _VERDICT_EXIT[outcome.verdict]
    else:
        report["checks"].append(
            {"name": "emit", "verdict": HOLDS, "detail": f"{args.dim + 1} half-spaces"}
        )
        if not args.out:
            sys.stdout.write(canonical_dumps(instance))
    return exit_code


def cmd_refine(args, report) -> int:
    kind, payload = parse_instance(args.instance)
    tau = _tau(args)
    if args.scheme == "cauchy-halving":
        if kind != "family" or payload.subset is None:
            raise ValidationError("cauchy-halving needs a family instance with a subset")
        family = payload
        oracle = exact_subset_oracle(family.subset)
        point_, trace = almost_to_exact(
            oracle,
            LinfBallFamily(family.balls, family.subset),
            iterations=args.iters,
            scale=parse_rational(args.scale),
        )
        verdict = verify_trace(trace)
        report["checks"].append(
            {
                "name": "cauchy-halving",
                "verdict": HOLDS if verdict.passed else REFUTED,
                "point": to_jsonable(point_),
                "trace": to_jsonable(
                    {"iterates": trace.iterates, "slacks": trace.slacks, "steps": trace.steps}
                ),
            }
        )
        return EXIT_HOLDS if verdict.passed else EXIT_REFUTED
    if args.scheme == "triple-34":
        if kind != "triple":
            raise ValidationError("triple-34 needs a triple instance")
        sets, x0 = payload
        point_, outcome = triple_intersection(
            exact_subset_oracle(sets[0]),
            exact_subset_oracle(sets[1]),
            exact_subset_oracle(sets[2]),
            x0,
            rounds=args.iters,
        )
        report["checks"].append(
            {
                "name": "triple-34",
                "verdict": HOLDS if outcome.passed else REFUTED,
                "point": to_jsonable(point_),
                "gaps": to_jsonable(outcome.observed),
            }
        )
        return EXIT_HOLDS if outcome.passed else EXIT_REFUTED
    if args.scheme == "chain-walk":
        from .refine import chain_walk

        if kind != "chain":
            raise ValidationError("chain-walk needs a chain instance")
        spec = payload
        result = chain_walk(
            exact_subset_oracle(spec["sets"][0]),
            exact_subset_oracle(spec["sets"][1]),
            spec["x"],
            spec["r"],
            spec["y"],
            spec["eps"],
            spec["delta"],
        )
        report["checks"].append(
            {
                "name": "chain-walk",
                "verdict": HOLDS,
                "detail": f"path={result.path} n0={result.n0} calls={result.oracle_calls}",
                "pair": to_jsonable((result.a, result.a_prime)),
            }
        )
        return EXIT_HOLDS
    raise ValidationError(f"unknown scheme {args.scheme!r}")


def cmd_barycenter(args, report) -> int:
    kind, payload = parse_instance(args.instance)
    if kind != "points":
        raise ValidationError("barycenter needs a points instance")
    points = payload
    backend = linf_backend(len(points[0]))
    cfg = BarycenterConfig(tau=_tau(args))
    result = barycenter(backend, points, cfg)
    report["checks"].append(
        {"name": "barycenter", "verdict": HOLDS, "point": to_jsonable(result)}
    )
    return EXIT_HOLDS


def cmd_ip_threshold(args, report) -> int:
    value = ip_threshold(args.k)
    report["checks"].append({"name": f"ip-threshold-k{args.k}", "verdict": HOLDS, "detail": str(value)})
    if not args.json:
        print(value)
        return EXIT_HOLDS
    return EXIT_HOLDS


def cmd_ip_lift(args, report) -> int:
    kind, payload = parse_instance(args.instance)
    if kind != "ip":
        raise ValidationError("ip-lift needs an ip instance")
    balls = payload["balls"]
    k = payload["k"]
    n = len(balls) - 1
    eps = payload["eps"] if payload["eps"] is not None else default_ip_eps(n, k)
    params = ip_constants(n, k, eps)
    point_, trace = ip_lift(
        exact_box_ip_oracle, balls, linf_backend(balls[0].dim), params, rounds=args.iters,
        cfg=BarycenterConfig(tau=_tau(args)),
    )
    report["checks"].append(
        {
            "name": "ip-lift",
            "verdict": HOLDS,
            "point": to_jsonable(point_),
            "reaches": to_jsonable(trace.slacks),
            "c": to_jsonable(params.c),
        }
    )
    return EXIT_HOLDS


def cmd_graph_scan(args, report) -> int:
    kind, payload = parse_instance(args.instance)
    if kind != "graph":
        raise ValidationError("graph-scan needs a graph instance")
    outcome = graph_n_helly_bruteforce(payload, args.level)
    report["checks"].append(
        {
            "name": f"graph-helly-{args.level}",
            "verdict": outcome.verdict,
            "certificate": to_jsonable(outcome.certificate),
        }
    )
    return _VERDICT_EXIT[outcome.verdict]


_COMMANDS = {
    "check": cmd_check,
    "refute": cmd_refute,
    "helly": cmd_helly,
    "refine": cmd_refine,
    "barycenter": cmd_barycenter,
    "ip-threshold": cmd_ip_threshold,
    "ip-lift": cmd_ip_lift,
    "graph-scan": cmd_graph_scan,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperball", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, instance=True):
        if instance:
            p.add_argument("--instance", required=True, help="instance JSON file")
        p.add_argument("--json", action="store_true", help="emit the JSON report")
        p.add_argument("--out", help="write the JSON report (or emitted instance) here")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--budget", type=int, default=10_000)
        p.add_argument("--tau", help='stop tolerance as "p/q" (default 1/2^30)')

    p = sub.add_parser("check", help="validate an instance and run its predicate")
    common(p)
    p.add_argument("--k", type=int, help="Helly order for helly instances")

    p = sub.add_parser("refute", help="seeded counterexample search")
    common(p)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--mode", default="external", choices=["external", "hyperconvex", "weakly-external"])

    p = sub.add_parser("helly", help="emit or verify the optimal-order family")
    common(p, instance=False)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--k", type=int)

    p = sub.add_parser("refine", help="run a refinement scheme with exact oracles")
    common(p)
    p.add_argument("--scheme", required=True, choices=["cauchy-halving", "chain-walk", "triple-34"])
    p.add_argument("--iters", type=int, default=40)
    p.add_argument("--scale", default="1/1")

    p = sub.add_parser("barycenter", help="barycenter of a point tuple")
    common(p)

    p = sub.add_parser("ip-threshold", help="least lifting size for a given k")
    common(p, instance=False)
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("ip-lift", help="run the intersection-property lift")
    common(p)
    p.add_argument("--iters", type=int, default=30)

    p = sub.add_parser("graph-scan", help="exhaustive graph ball-Helly check")
    common(p)
    p.add_argument("--level", type=int, required=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else EXIT_USAGE
    started = time.monotonic()
    handler = _COMMANDS[args.command]
    report = _report_scaffold(args, args.command)
    try:
        code = handler(args, report)
    except (ParseError, ValidationError, RationalParseError, HyperballError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(report, args, started)
    return code


if __name__ == "__main__":
    sys.exit(main())
