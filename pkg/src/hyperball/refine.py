"""Constructive refinement schemes over slack oracles.

A slack oracle answers "give me a point of the subset inside every ball,
each inflated by eps" — the almost-hyperconvexity interface.  The three
schemes here turn such answers into points with certified error bounds:

* ``almost_to_exact``  — halving-slack Cauchy iteration ("cauchy-halving");
* ``chain_walk``       — the finite alternating walk between two subsets
                         ("chain-walk"), with an optional outer loop that
                         drives the pair distance to zero geometrically;
* ``triple_intersection`` — the 3/4-contraction onto a third subset
                         ("triple-34").

Every recorded inequality in a trace is a postcondition re-verified with
exact rationals; a contract breach is attributed to the oracle via
``OracleFailure``, never absorbed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Mapping

from .errors import HyperballError
from .lab import LinfBallFamily, NotAdmissible, check_admissible
from .linf import Ball, Point, balls_box, linf_dist
from .sets import pair_witness, subset_contains, subset_dist, subset_witness_in_box


class OracleFailure(HyperballError):
    """The oracle violated its contract at the given call index."""

    def __init__(self, step: int, message: str = ""):
        super().__init__(f"oracle contract violated at call {step}: {message}")
        self.step = step


class PairwiseIntersectionUnverified(HyperballError):
    """A required pairwise intersection could not be certified non-empty."""


@dataclass(frozen=True)
class EpsOracle:
    """Callable (balls, slack) -> point in subset ∩ (inflated balls).

    ``level`` declares how many balls the contract covers; ``external``
    distinguishes the externally-admissible contract (centers anywhere with
    d(center, A) <= radius) from the plain one (centers in A).  ``subset``
    is the set handle used for exact membership and distance verification.
    """

    query: Callable[[tuple[Ball, ...], Fraction], Point | None]
    level: int
    subset: Any
    external: bool = True
    label: str = ""

    def __call__(self, balls: tuple[Ball, ...], slack: Fraction) -> Point | None:
        return self.query(balls, slack)


def exact_subset_oracle(subset, level: int = 64, label: str = "") -> EpsOracle:
    """Oracle backed by the subset's exact witness search: returned points
    satisfy the *uninflated* constraints whenever that is possible."""

    def query(balls: tuple[Ball, ...], slack: Fraction) -> Point | None:
        window = balls_box(balls)
        hit = subset_witness_in_box(subset, window)
        if hit is not None:
            return hit
        grown = balls_box(tuple(Ball(b.center, b.radius + slack) for b in balls))
        return subset_witness_in_box(subset, grown)

    return EpsOracle(query, level, subset, label=label or "exact")


def saturating_subset_oracle(subset, level: int = 64, label: str = "") -> EpsOracle:
    """Contract-conformant stress oracle: answers from the fully inflated
    system only, so returned points may violate the uninflated constraints
    by up to the whole slack."""

    def query(balls: tuple[Ball, ...], slack: Fraction) -> Point | None:
        grown = balls_box(tuple(Ball(b.center, b.radius + slack) for b in balls))
        return subset_witness_in_box(subset, grown)

    return EpsOracle(query, level, subset, label=label or "saturating")


def broken_oracle(subset, offset: Fraction, level: int = 64) -> EpsOracle:
    """Deliberately out-of-contract oracle for failure-path tests."""

    def query(balls: tuple[Ball, ...], slack: Fraction) -> Point | None:
        grown = balls_box(tuple(Ball(b.center, b.radius + slack) for b in balls))
        hit = subset_witness_in_box(subset, grown)
        if hit is None:
            return None
        return tuple(c + offset for c in hit)

    return EpsOracle(query, level, subset, label="broken")


@dataclass(frozen=True)
class RefinementTrace:
    """Iterates with their slack schedule and recorded step distances."""

    scheme: str  # "cauchy-halving" | "chain-walk" | "triple-34"
    iterates: tuple[Point, ...]
    slacks: tuple[Fraction, ...]
    steps: tuple[Fraction, ...]
    family: LinfBallFamily | None = None
    aux: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class ContractionReport:
    scheme: str
    observed: tuple[Fraction, ...]
    bounds: tuple[Fraction, ...]
    step_ok: tuple[bool, ...]
    passed: bool
    notes: tuple[str, ...] = ()
    trace: RefinementTrace | None = None


def _verify_oracle_point(
    oracle: EpsOracle, balls: tuple[Ball, ...], slack: Fraction, p: Point | None, call: int
) -> Point:
    if p is None:
        raise OracleFailure(call, "no point returned")
    for b in balls:
        if linf_dist(p, b.center) > b.radius + slack:
            raise OracleFailure(call, f"outside inflated ball around {b.center}")
    if oracle.subset is not None and not subset_contains(oracle.subset, p):
        raise OracleFailure(call, "point not in subset")
    return p


# ---------------------------------------------------------------------------
# Scheme 1: halving-slack Cauchy iteration


def almost_to_exact(
    oracle: EpsOracle,
    family: LinfBallFamily,
    iterations: int = 40,
    scale: Fraction = Fraction(1),
) -> tuple[Point, RefinementTrace]:
    """Iterate slack halving: point k+1 is asked to lie within
    scale * 2^-(k+1) of every target ball and within
    scale * (2^-k + 2^-(k+1)) of point k, so the sequence is Cauchy with an
    explicit geometric tail.

    The slack schedule assumes unit scale; ``scale`` stretches it to the
    instance's size and is recorded in the trace.
    """
    if iterations < 1:
        raise ValueError("need at least one iteration")
    if scale <= 0:
        raise ValueError("scale must be positive")
    if oracle.level < len(family) + 1:
        raise ValueError("oracle contract does not cover |family| + 1 balls")
    adm = check_admissible(
        LinfBallFamily(family.balls, oracle.subset) if oracle.subset is not None else family
    )
    if not adm:
        raise NotAdmissible(f"{adm.kind} violation at {adm.indices}")
    balls = family.balls
    iterates: list[Point] = []
    slacks: list[Fraction] = []
    steps: list[Fraction] = []
    prev: Point | None = None
    for k in range(iterations):
        slack = scale / (1 << (k + 1))
        asked = balls if prev is None else balls + (Ball(prev, scale / (1 << k)),)
        p = _verify_oracle_point(oracle, asked, slack, oracle(asked, slack), k)
        if prev is not None:
            steps.append(linf_dist(prev, p))
        iterates.append(p)
        slacks.append(slack)
        prev = p
    trace = RefinementTrace(
        "cauchy-halving",
        tuple(iterates),
        tuple(slacks),
        tuple(steps),
        family,
        aux={"scale": scale},
    )
    return prev, trace


# ---------------------------------------------------------------------------
# Scheme 2: alternating chain walk between two subsets


@dataclass(frozen=True)
class ChainWalkResult:
    a: Point
    a_prime: Point
    path: str  # "chain" | "negative-gap"
    n0: int
    eps_tilde: Fraction
    delta_used: Fraction
    oracle_calls: int
    rounds: tuple[Mapping[str, Any], ...] = ()


def _chain_step(
    oracle_a: EpsOracle,
    oracle_b: EpsOracle,
    x: Point,
    r: Fraction,
    y: Point,
    eps: Fraction,
    delta: Fraction,
    call_base: int,
) -> ChainWalkResult:
    """One pass of the finite walk: alternate slack-oracle picks marching
    from y toward the ball B(x, r), ending with a pair (a, a') at distance
    <= eps, both within r + delta of x and with d(y, a) <= s + eps."""
    d_xy = linf_dist(x, y)
    s = d_xy - r
    eps_tilde = eps / 2
    n0 = int(s // eps_tilde) if s > 0 else 0
    delta_used = min(delta, eps_tilde / (n0 + 1))
    calls = 0
    acc = Fraction(0)  # running sum of delta_used / 2^i
    prev = y
    for n in range(1, n0 + 1):
        target = oracle_a if n % 2 == 1 else oracle_b
        slack = delta_used / (1 << n)
        asked = (Ball(prev, eps_tilde + acc), Ball(x, d_xy - n * eps_tilde + acc))
        prev = _verify_oracle_point(target, asked, slack, target(asked, slack), call_base + calls)
        calls += 1
        acc += slack
    # prev sits in A' when n0 is even (y counts as both); finish with the
    # opposite set first so the pair straddles both subsets.
    first, second = (oracle_a, oracle_b) if n0 % 2 == 0 else (oracle_b, oracle_a)
    slack1 = delta_used / (1 << (n0 + 1))
    asked1 = (Ball(prev, eps_tilde + acc), Ball(x, r + acc))
    p1 = _verify_oracle_point(first, asked1, slack1, first(asked1, slack1), call_base + calls)
    calls += 1
    acc += slack1
    slack2 = delta_used / (1 << (n0 + 2))
    asked2 = (Ball(p1, eps_tilde + acc), Ball(x, r + acc))
    p2 = _verify_oracle_point(second, asked2, slack2, second(asked2, slack2), call_base + calls)
    calls += 1
    a, a_prime = (p1, p2) if n0 % 2 == 0 else (p2, p1)
    checks = {
        "a in A": subset_contains(oracle_a.subset, a),
        "a' in A'": subset_contains(oracle_b.subset, a_prime),
        "d(x,a) <= r+delta": linf_dist(x, a) <= r + delta,
        "d(x,a') <= r+delta": linf_dist(x, a_prime) <= r + delta,
        "d(a,a') <= eps": linf_dist(a, a_prime) <= eps,
        "d(y,a) <= s+eps": linf_dist(y, a) <= max(s, 0) + eps,
    }
    for name, ok in checks.items():
        if not ok:
            raise OracleFailure(call_base + calls - 1, f"postcondition {name} failed")
    return ChainWalkResult(a, a_prime, "chain", n0, eps_tilde, delta_used, calls)


def chain_walk(
    oracle_a: EpsOracle,
    oracle_b: EpsOracle,
    x: Point,
    r: Fraction,
    y: Point,
    eps: Fraction,
    delta: Fraction,
    rounds: int = 1,
    ambient: EpsOracle | None = None,
) -> ChainWalkResult:
    """Find a straddling pair near B(x, r) starting from a common point y.

    Preconditions (verified exactly): y lies in both subsets and
    d(x, A), d(x, A') <= r.  With s := d(x,y) - r < 0 the walk is skipped and
    (y, y) is returned on the "negative-gap" path.  ``rounds`` > 1 runs the
    outer double-sequence, re-centering through a 3-ball ambient oracle and
    halving both tolerances each round; per-round bounds are recorded and
    re-verified.
    """
    if eps <= 0 or delta <= 0:
        raise ValueError("eps and delta must be positive")
    for oracle, name in ((oracle_a, "A"), (oracle_b, "A'")):
        if not subset_contains(oracle.subset, y):
            raise ValueError(f"y is not in {name}")
        if subset_dist(oracle.subset, x) > r:
            raise NotAdmissible(f"d(x, {name}) > r")
    s = linf_dist(x, y) - r
    if s < 0:
        return ChainWalkResult(y, y, "negative-gap", 0, eps / 2, delta, 0)
    if rounds <= 1:
        return _chain_step(oracle_a, oracle_b, x, r, y, eps, delta, 0)
    if ambient is None:
        raise ValueError("outer rounds need a 3-ball ambient oracle")
    if ambient.level < 3:
        raise ValueError("ambient oracle must cover 3 balls")
    result = _chain_step(oracle_a, oracle_b, x, r, y, eps / 2, delta / 2, 0)
    a, b = result.a, result.a_prime
    calls = result.oracle_calls
    acc = delta / 2  # Delta_1
    eps_acc = eps / 2  # E_1
    log: list[Mapping[str, Any]] = []
    for n in range(2, rounds + 1):
        eps_n = eps / (1 << n)
        r_n = eps_n + delta / (1 << (n + 2))
        asked = (
            Ball(a, eps_n),
            Ball(b, eps_n),
            Ball(x, r + acc - eps_n),
        )
        slack = delta / (1 << (n + 2))
        x_n = _verify_oracle_point(ambient, asked, slack, ambient(asked, slack), calls)
        calls += 1
        inner = _chain_step(
            oracle_a, oracle_b, x_n, r_n, y, eps_n, delta / (1 << (n + 1)), calls
        )
        calls += inner.oracle_calls
        a_new, b_new = inner.a, inner.a_prime
        acc += delta / (1 << n)
        eps_acc += eps / (1 << n)
        record = {
            "round": n,
            "pair_gap": linf_dist(a_new, b_new),
            "pair_gap_bound": eps / (1 << n),
            "step_a": linf_dist(a, a_new),
            "step_bound": (2 * eps + delta) / (1 << n),
            "d_x": max(linf_dist(x, a_new), linf_dist(x, b_new)),
            "d_x_bound": r + acc,
            "d_y": linf_dist(y, a_new),
            "d_y_bound": max(s, 0) + eps_acc,
        }
        for got, bound in (
            ("pair_gap", "pair_gap_bound"),
            ("step_a", "step_bound"),
            ("d_x", "d_x_bound"),
            ("d_y", "d_y_bound"),
        ):
            if record[got] > record[bound]:
                raise OracleFailure(calls - 1, f"round {n}: {got} exceeded {bound}")
        log.append(record)
        a, b = a_new, b_new
    return ChainWalkResult(
        a, b, "chain", result.n0, eps / 2, result.delta_used, calls, tuple(log)
    )


# ---------------------------------------------------------------------------
# Scheme 3: 3/4-contraction onto a third subset


def triple_intersection(
    oracle0: EpsOracle,
    oracle1: EpsOracle,
    oracle2: EpsOracle,
    x0: Point,
    rounds: int = 40,
) -> tuple[Point, ContractionReport]:
    """March a point of A1 ∩ A2 toward A0 with ratio 3/4 per round.

    Requires oracle0 to cover 3 balls and all three subsets to pairwise
    intersect (certified up front).  Records d(x_n, A0) <= (3/4)^n r0 and
    d(x_n, x_{n+1}) <= (1/2)(3/4)^n r0, both re-verified exactly.
    """
    if oracle0.level < 3:
        raise ValueError("oracle0 must cover 3 balls")
    A0, A1, A2 = oracle0.subset, oracle1.subset, oracle2.subset
    if not (subset_contains(A1, x0) and subset_contains(A2, x0)):
        raise ValueError("x0 must lie in A1 and A2")
    for left, right, name in ((A0, A1, "A0,A1"), (A0, A2, "A0,A2"), (A1, A2, "A1,A2")):
        if pair_witness(left, right) is None:
            raise PairwiseIntersectionUnverified(name)
    iterates: list[Point] = [x0]
    gaps: list[Fraction] = [subset_dist(A0, x0)]
    steps: list[Fraction] = []
    calls = 0
    for _ in range(rounds):
        rho = gaps[-1]
        if rho == 0:
            break
        xn = iterates[-1]
        y = pair_witness(A0, A1, (Ball(xn, rho * Fraction(13, 12)),))
        if y is None:
            raise OracleFailure(calls, "A0 ∩ A1 pick failed")
        z = pair_witness(
            A0, A2, (Ball(xn, rho * Fraction(7, 6)), Ball(y, rho * Fraction(7, 6)))
        )
        if z is None:
            raise OracleFailure(calls, "A0 ∩ A2 pick failed")
        asked = (
            Ball(xn, rho),
            Ball(y, rho * Fraction(7, 12)),
            Ball(z, rho * Fraction(7, 12)),
        )
        slack = rho / 12
        xbar = _verify_oracle_point(oracle0, asked, slack, oracle0(asked, slack), calls)
        calls += 1
        xn1 = pair_witness(
            A1, A2, (Ball(xbar, rho * Fraction(3, 4)), Ball(xn, rho / 2))
        )
        if xn1 is None:
            raise OracleFailure(calls, "A1 ∩ A2 re-centering failed")
        step = linf_dist(xn, xn1)
        if step > rho / 2:
            raise OracleFailure(calls, "step exceeded rho/2")
        gap = subset_dist(A0, xn1)
        if gap > rho * Fraction(3, 4):
            raise OracleFailure(calls, "contraction exceeded 3/4")
        iterates.append(xn1)
        gaps.append(gap)
        steps.append(step)
    r0 = gaps[0]
    bounds = tuple(r0 * Fraction(3, 4) ** n for n in range(len(gaps)))
    step_bounds = tuple(r0 * Fraction(1, 2) * Fraction(3, 4) ** n for n in range(len(steps)))
    ok_gaps = tuple(g <= b for g, b in zip(gaps, bounds))
    ok_steps = tuple(s <= b for s, b in zip(steps, step_bounds))
    trace = RefinementTrace(
        "triple-34",
        tuple(iterates),
        tuple(gaps),
        tuple(steps),
        aux={"r0": r0, "subsets": (A0, A1, A2)},
    )
    report = ContractionReport(
        "triple-34",
        observed=tuple(gaps),
        bounds=bounds,
        step_ok=ok_gaps + ok_steps,
        passed=all(ok_gaps) and all(ok_steps),
        trace=trace,
    )
    return iterates[-1], report


# ---------------------------------------------------------------------------
# Independent trace verification


def verify_trace(trace: RefinementTrace, scheme: str | None = None) -> ContractionReport:
    """Recompute every recorded step distance exactly and re-check the
    scheme's bounds; a perturbed iterate fails at its step."""
    scheme = scheme or trace.scheme
    if not trace.iterates:
        return ContractionReport(
            scheme, (), (), (), True, notes=("empty trace: vacuously consistent",)
        )
    recomputed = tuple(
        linf_dist(trace.iterates[i], trace.iterates[i + 1])
        for i in range(len(trace.iterates) - 1)
    )
    notes: list[str] = []
    if recomputed != trace.steps:
        return ContractionReport(
            scheme,
            recomputed,
            trace.steps,
            tuple(a == b for a, b in zip(recomputed, trace.steps)),
            False,
            notes=("recorded step distances disagree with iterates",),
        )
    if scheme == "cauchy-halving":
        scale = trace.aux.get("scale", Fraction(1))
        bounds = tuple(
            scale * (Fraction(1, 1 << (i + 1)) + Fraction(1, 1 << (i + 2)))
            for i in range(len(recomputed))
        )
        ok = tuple(s <= b for s, b in zip(recomputed, bounds))
        if trace.family is not None and trace.slacks:
            final, slack = trace.iterates[-1], trace.slacks[-1]
            for b in trace.family.balls:
                if linf_dist(final, b.center) > b.radius + slack:
                    ok = ok + (False,)
                    notes.append("final iterate violates the final slack")
        return ContractionReport(scheme, recomputed, bounds, ok, all(ok), tuple(notes))
    if scheme == "triple-34":
        r0 = trace.aux["r0"]
        gaps = trace.slacks  # d(x_n, A0) recorded per iterate
        subsets = trace.aux.get("subsets")
        if subsets is not None:
            A0 = subsets[0]
            for n, (p, g) in enumerate(zip(trace.iterates, gaps)):
                if subset_dist(A0, p) != g:
                    return ContractionReport(
                        scheme, recomputed, (), (), False,
                        notes=(f"recorded gap at round {n} disagrees",),
                    )
        gap_bounds = tuple(r0 * Fraction(3, 4) ** n for n in range(len(gaps)))
        step_bounds = tuple(
            r0 * Fraction(1, 2) * Fraction(3, 4) ** n for n in range(len(recomputed))
        )
        ok = tuple(g <= b for g, b in zip(gaps, gap_bounds)) + tuple(
            s <= b for s, b in zip(recomputed, step_bounds)
        )
        return ContractionReport(scheme, recomputed, gap_bounds + step_bounds, ok, all(ok))
    raise ValueError(f"unknown scheme {scheme!r}")
