"""Barycenters over a geodesic selection, their three contract checks, and
the ball-family intersection-property threshold with its lifting iteration.

The barycenter of one point is that point, of two the geodesic midpoint,
and for m >= 3 the leave-one-out map

    (x_1, ..., x_m)  ->  (bar(x̂^1), ..., bar(x̂^m))

is iterated until the tuple's diameter drops below the stop tolerance; any
component is then returned.  On a linear selection the sub-barycenters are
evaluated through exact affine weights (the inner limits are exact means),
which keeps the iteration honest while making large tuples affordable; a
pointwise recursion is kept alongside for cross-checking small tuples.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from typing import Callable, Sequence

from .errors import HyperballError
from .linf import Ball, Point, balls_box, linf_dist, sigma
from .refine import RefinementTrace


class NoConvergence(HyperballError):
    """The leave-one-out iteration exceeded its round budget."""


class TupleTooLarge(HyperballError):
    """Exhaustive permutation matching is limited to small tuples."""


class KTooSmall(HyperballError):
    """Intersection-property parameters need k >= 2."""


class ContractionNotGuaranteed(HyperballError):
    """The lifting constant c is not < 1 for these parameters."""


class KSubfamilyEmpty(HyperballError):
    """A k-subfamily of the input balls has empty intersection."""


@dataclass(frozen=True)
class BicombingBackend:
    """A symmetric constant-speed geodesic selection with its metric."""

    dim: int
    sigma: Callable[[Point, Point, Fraction], Point]
    dist: Callable[[Point, Point], Fraction]
    linear: bool = False


def linf_backend(dim: int) -> BicombingBackend:
    return BicombingBackend(dim, sigma, linf_dist, linear=True)


@dataclass(frozen=True)
class BarycenterConfig:
    tau: Fraction = Fraction(1, 1 << 30)
    max_rounds: int = 200
    pointwise: bool = False  # force the slow recursion (testing aid)

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")


_POINTWISE_LIMIT = 6
_INNER_SHRINK = 1 << 9  # inner tolerance factor for the pointwise recursion


def barycenter(
    backend: BicombingBackend, points: Sequence[Point], cfg: BarycenterConfig | None = None
) -> Point:
    cfg = cfg or BarycenterConfig()
    pts = tuple(points)
    if not pts:
        raise ValueError("barycenter of no points")
    if cfg.pointwise or not backend.linear:
        if len(pts) > _POINTWISE_LIMIT:
            raise TupleTooLarge(
                f"pointwise recursion limited to {_POINTWISE_LIMIT} points"
            )
        return _barycenter_pointwise(backend, pts, cfg.tau, cfg.max_rounds)
    return _barycenter_weights(backend, pts, cfg)


def _barycenter_pointwise(
    backend: BicombingBackend, pts: tuple[Point, ...], tau: Fraction, max_rounds: int
) -> Point:
    m = len(pts)
    if m == 1:
        return pts[0]
    if m == 2:
        return backend.sigma(pts[0], pts[1], Fraction(1, 2))
    inner_tau = tau / _INNER_SHRINK
    current = pts
    for _ in range(max_rounds):
        if _diameter(backend, current) * 2 <= tau:
            return current[0]
        current = tuple(
            _barycenter_pointwise(
                backend,
                current[:i] + current[i + 1 :],
                inner_tau,
                max_rounds,
            )
            for i in range(m)
        )
    raise NoConvergence(f"no convergence within {max_rounds} rounds")


def _diameter(backend: BicombingBackend, pts: Sequence[Point]) -> Fraction:
    best = Fraction(0)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            d = backend.dist(pts[i], pts[j])
            if d > best:
                best = d
    return best


def _barycenter_weights(
    backend: BicombingBackend, pts: tuple[Point, ...], cfg: BarycenterConfig
) -> Point:
    """Leave-one-out iteration with sub-barycenters evaluated exactly.

    On a linear selection the limit of the (m-1)-point recursion is the
    arithmetic mean, so each component of the iterate tuple is an exact
    affine combination of the inputs; rounds then contract the diameter by
    1/(m-1) and the tuple mean is preserved exactly.
    """
    m = len(pts)
    if m == 1:
        return pts[0]
    if m == 2:
        return backend.sigma(pts[0], pts[1], Fraction(1, 2))
    current = pts
    prev_diam = None
    for _ in range(cfg.max_rounds):
        diam = _diameter(backend, current)
        if prev_diam is not None and diam > prev_diam:
            raise HyperballError("leave-one-out round increased the diameter")
        prev_diam = diam
        if diam * 2 <= cfg.tau:
            return current[0]
        share = Fraction(1, m - 1)
        sums = tuple(
            sum((p[k] for p in current), Fraction(0)) for k in range(backend.dim)
        )
        current = tuple(
            tuple((sums[k] - p[k]) * share for k in range(backend.dim))
            for p in current
        )
    raise NoConvergence(f"no convergence within {cfg.max_rounds} rounds")


# ---------------------------------------------------------------------------
# Contract checks


def min_matching_average(xs: Sequence[Point], ys: Sequence[Point], dist) -> Fraction:
    """min over permutations of (1/m) sum d(x_i, y_pi(i)); exhaustive, m <= 8."""
    if len(xs) != len(ys):
        raise ValueError("tuples of different sizes")
    m = len(xs)
    if m > 8:
        raise TupleTooLarge("matching minimum enumerates m! permutations, m <= 8")
    best = None
    for pi in permutations(range(m)):
        cost = sum((dist(xs[i], ys[pi[i]]) for i in range(m)), Fraction(0))
        if best is None or cost < best:
            best = cost
    return best / m


def barycenter_contraction_check(
    backend: BicombingBackend,
    xs: Sequence[Point],
    ys: Sequence[Point],
    cfg: BarycenterConfig | None = None,
):
    """d(bar(xs), bar(ys)) <= min-matching average + 3*tau (truncation slack)."""
    from .reports import HOLDS, REFUTED, PropertyReport

    cfg = cfg or BarycenterConfig()
    bx = barycenter(backend, xs, cfg)
    by = barycenter(backend, ys, cfg)
    left = backend.dist(bx, by)
    right = min_matching_average(xs, ys, backend.dist)
    slack = 3 * cfg.tau
    if left <= right + slack:
        return PropertyReport(HOLDS, certificate={"left": left, "right": right})
    return PropertyReport(REFUTED, certificate={"left": left, "right": right, "slack": slack})


@dataclass(frozen=True)
class Isometry:
    """Coordinate permutation followed by a translation (both preserve the
    linear geodesic selection)."""

    perm: tuple[int, ...]
    shift: tuple[Fraction, ...]

    def apply(self, p: Point) -> Point:
        return tuple(p[self.perm[k]] + self.shift[k] for k in range(len(self.perm)))


def equivariance_check(
    backend: BicombingBackend,
    iso: Isometry,
    xs: Sequence[Point],
    cfg: BarycenterConfig | None = None,
):
    """d(iso(bar(xs)), bar(iso(xs))) <= 2*tau."""
    from .reports import HOLDS, REFUTED, PropertyReport

    cfg = cfg or BarycenterConfig()
    direct = iso.apply(barycenter(backend, xs, cfg))
    mapped = barycenter(backend, tuple(iso.apply(p) for p in xs), cfg)
    gap = backend.dist(direct, mapped)
    verdict = HOLDS if gap <= 2 * cfg.tau else REFUTED
    return PropertyReport(verdict, certificate={"gap": gap})


# ---------------------------------------------------------------------------
# (n, k) intersection property: threshold, constants, lift


def ip_threshold(k: int) -> int:
    """Least n from which the n-ball intersection property lifts to all
    sizes: the minimal integer with 2(n-k+2)(n-k+1) > n(n+1)."""
    if k < 2:
        raise KTooSmall("k must be >= 2")
    n = k
    while 2 * (n - k + 2) * (n - k + 1) <= n * (n + 1):
        n += 1
    return n


@dataclass(frozen=True)
class IPParams:
    n: int
    k: int
    N: int
    N_prime: int
    c: Fraction
    eps: Fraction


def ip_constants(n: int, k: int, eps: Fraction = Fraction(0)) -> IPParams:
    """Enumerate the (n-1)-subsets of {1..n+1} and those containing a fixed
    (k-1)-set; c = 2 (N - N')/N (1+eps)^2.

    N' is counted, not taken from a closed form: the count is
    (n-k+2)(n-k+1)/2, which is also cross-checked in the tests against the
    threshold formula.
    """
    if k < 2:
        raise KTooSmall("k must be >= 2")
    if not (k <= n):
        raise ValueError("need k <= n")
    if eps < 0:
        raise ValueError("eps must be >= 0")
    ground = range(1, n + 2)
    fixed = set(range(1, k))  # a (k-1)-subset
    N = 0
    N_prime = 0
    for alpha in combinations(ground, n - 1):
        N += 1
        if fixed.issubset(alpha):
            N_prime += 1
    c = Fraction(2 * (N - N_prime), N) * (1 + eps) ** 2
    return IPParams(n, k, N, N_prime, c, eps)


def default_ip_eps(n: int, k: int) -> Fraction:
    """Largest eps on the 1/1024 grid keeping c <= (1 + c0)/2, where c0 is
    the eps = 0 constant; a concrete rule so runs are reproducible."""
    c0 = ip_constants(n, k).c
    if c0 >= 1:
        return Fraction(0)
    target = (1 + c0) / 2
    grid = Fraction(1, 1024)
    eps = Fraction(0)
    while ip_constants(n, k, eps + grid).c <= target:
        eps += grid
    return eps


def exact_box_ip_oracle(balls: Sequence[Ball], center: Point, radius: Fraction) -> Point | None:
    """Exact witness provider: the point of (∩ balls) ∩ B(center, radius)
    nearest to center (coordinatewise clamp), or None."""
    window = balls_box(tuple(balls) + (Ball(center, radius),))
    if window.first_empty_coordinate() is not None:
        return None
    return window.clamp(center)


def ip_lift(
    oracle: Callable[[Sequence[Ball], Point, Fraction], Point | None],
    balls: Sequence[Ball],
    backend: BicombingBackend,
    params: IPParams,
    rounds: int = 30,
    cfg: BarycenterConfig | None = None,
) -> tuple[Point, RefinementTrace]:
    """Lift the (n,k)-intersection property to n+1 balls by iteration.

    From a base point, each round gathers a witness inside every
    (n-1)-subfamily within (1+eps) of the current reach R_j and barycenters
    them; the distance to every (k-1)-fold intersection contracts by the
    factor c < 1.  The trace records iterates, reaches, and steps.
    """
    cfg = cfg or BarycenterConfig()
    balls = tuple(balls)
    n, k = params.n, params.k
    if len(balls) != n + 1:
        raise ValueError(f"need n+1 = {n + 1} balls")
    if params.c >= 1:
        raise ContractionNotGuaranteed(f"c = {params.c} is not < 1")
    for subset in combinations(range(n + 1), k):
        if balls_box(tuple(balls[i] for i in subset)).first_empty_coordinate() is not None:
            raise KSubfamilyEmpty(f"k-subfamily {subset} has empty intersection")
    j_sets = list(combinations(range(n + 1), k - 1))
    omega = list(combinations(range(n + 1), n - 1))

    def reach(p: Point) -> Fraction:
        return max(
            balls_box(tuple(balls[i] for i in J)).dist(p) for J in j_sets
        )

    base = barycenter(backend, tuple(b.center for b in balls), cfg)
    iterates = [base]
    reaches = [reach(base)]
    steps: list[Fraction] = []
    R = reaches[0]
    for _ in range(rounds):
        y = iterates[-1]
        R_j = reaches[-1]
        if R_j == 0:
            break
        window = (1 + params.eps) * R_j
        witnesses = []
        for alpha in omega:
            w = oracle(tuple(balls[i] for i in alpha), y, window)
            if w is None:
                raise HyperballError(f"witness oracle failed on subfamily {alpha}")
            if backend.dist(y, w) > window:
                raise HyperballError("oracle point outside the allowed window")
            for i in alpha:
                if not balls[i].contains(w):
                    raise HyperballError("oracle point outside a subfamily ball")
            witnesses.append(w)
        nxt = barycenter(backend, tuple(witnesses), cfg)
        steps.append(backend.dist(y, nxt))
        iterates.append(nxt)
        reaches.append(reach(nxt))
    trace = RefinementTrace(
        "ip-lift",
        tuple(iterates),
        tuple(reaches),
        tuple(steps),
        aux={"R": R, "c": params.c, "eps": params.eps, "k": k, "n": n},
    )
    return iterates[-1], trace
