"""Exact geometry of (R^n, max norm): points, balls-as-boxes, the linear
geodesic selection, clamp retraction, and minimal-modulus interval picks.

Points are plain tuples of Fractions.  Balls of the max norm are axis
boxes; most witness searches below reduce to per-coordinate interval
arithmetic, which is the fast exact path everything else cross-checks
against.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

from .errors import DimMismatch, HyperballError
from .rational import parse_rational

Point = tuple[Fraction, ...]


class ParamOutOfRange(HyperballError):
    """Interpolation time outside [0, 1]."""


class EmptyBox(HyperballError):
    """A coordinate box with lo > hi in some coordinate."""


class EmptyIntersection(HyperballError):
    """Two intervals that were required to intersect do not."""


def point(*coords: object) -> Point:
    return tuple(parse_rational(c) for c in coords)


def linf_dist(p: Point, q: Point) -> Fraction:
    """Chebyshev distance max_k |p_k - q_k|."""
    if len(p) != len(q):
        raise DimMismatch(f"points of dim {len(p)} and {len(q)}")
    if not p:
        return Fraction(0)
    return max(abs(a - b) for a, b in zip(p, q))


@dataclass(frozen=True)
class Ball:
    """Closed ball B(center, radius) of the max norm."""

    center: Point
    radius: Fraction

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("ball radius must be >= 0")

    @property
    def dim(self) -> int:
        return len(self.center)

    def to_box(self) -> "Box":
        r = self.radius
        return Box(tuple(c - r for c in self.center), tuple(c + r for c in self.center))

    def contains(self, p: Point) -> bool:
        return linf_dist(self.center, p) <= self.radius


@dataclass(frozen=True)
class Box:
    """Axis-aligned product of closed intervals [lo_k, hi_k]."""

    lo: Point
    hi: Point

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise DimMismatch("box bounds of different dims")

    @property
    def dim(self) -> int:
        return len(self.lo)

    def is_empty(self) -> bool:
        return any(l > h for l, h in zip(self.lo, self.hi))

    def first_empty_coordinate(self) -> int | None:
        for k, (l, h) in enumerate(zip(self.lo, self.hi)):
            if l > h:
                return k
        return None

    def contains(self, p: Point) -> bool:
        if len(p) != self.dim:
            raise DimMismatch("point dim does not match box dim")
        return all(l <= x <= h for l, x, h in zip(self.lo, p, self.hi))

    def intersect(self, other: "Box") -> "Box":
        if self.dim != other.dim:
            raise DimMismatch("boxes of different dims")
        return Box(
            tuple(max(a, b) for a, b in zip(self.lo, other.lo)),
            tuple(min(a, b) for a, b in zip(self.hi, other.hi)),
        )

    def clamp(self, p: Point) -> Point:
        if self.is_empty():
            raise EmptyBox("cannot clamp onto an empty box")
        return tuple(min(max(x, l), h) for l, x, h in zip(self.lo, p, self.hi))

    def dist(self, p: Point) -> Fraction:
        """Chebyshev distance from p to the box (0 when inside)."""
        if self.is_empty():
            raise EmptyBox("distance to an empty box is undefined")
        gaps = [max(l - x, x - h, Fraction(0)) for l, x, h in zip(self.lo, p, self.hi)]
        return max(gaps) if gaps else Fraction(0)

    def lowest_corner(self) -> Point:
        if self.is_empty():
            raise EmptyBox("empty box has no points")
        return self.lo


def balls_box(balls: Sequence[Ball]) -> Box:
    """Intersection of max-norm balls as a single (possibly empty) box."""
    if not balls:
        raise ValueError("need at least one ball")
    dim = balls[0].dim
    for b in balls:
        if b.dim != dim:
            raise DimMismatch("balls of different dims")
    box = balls[0].to_box()
    for b in balls[1:]:
        box = box.intersect(b.to_box())
    return box


@dataclass(frozen=True)
class FeasibilityResult:
    """Outcome of an exact witness search.

    A "witness" result carries a point that satisfies every constraint with
    exact rational arithmetic.  An "infeasible" result carries a certificate
    (the empty coordinate for interval systems, Farkas multipliers for
    linear programs).
    """

    status: str  # "witness" | "infeasible"
    witness: Point | None = None
    certificate: Mapping[str, Any] | None = None

    @property
    def feasible(self) -> bool:
        return self.status == "witness"


def ball_family_intersection(balls: Sequence[Ball]) -> FeasibilityResult:
    """Exact intersection of max-norm balls by per-coordinate intervals.

    The witness is the lowest admissible value in every coordinate, which
    makes reports reproducible.  Infeasibility names the first empty
    coordinate.
    """
    box = balls_box(balls)
    k = box.first_empty_coordinate()
    if k is not None:
        return FeasibilityResult("infeasible", certificate={"coordinate": k})
    return FeasibilityResult("witness", witness=box.lowest_corner())


def sigma(x: Point, y: Point, t: Fraction) -> Point:
    """Linear constant-speed geodesic (1-t)x + ty.

    Satisfies d(sigma(s), sigma(t)) = |s-t| d(x,y) and the symmetry
    sigma(y, x, t) = sigma(x, y, 1-t) exactly.
    """
    if len(x) != len(y):
        raise DimMismatch(f"points of dim {len(x)} and {len(y)}")
    if not (0 <= t <= 1):
        raise ParamOutOfRange(f"interpolation time {t} outside [0, 1]")
    return tuple(a + t * (b - a) for a, b in zip(x, y))


def box_retraction(region: Box | Ball, x: Point) -> Point:
    """Coordinatewise clamp onto a non-empty box.

    The clamp is a 1-Lipschitz idempotent retraction, realizes the exact
    distance d(x, box), and satisfies d(clamp(x), y) <= max(d(x,y), d(box,y))
    for every y.
    """
    box = region.to_box() if isinstance(region, Ball) else region
    if box.is_empty():
        raise EmptyBox("retraction target is empty")
    return box.clamp(x)


def min_modulus_selection(x: Fraction, r: Fraction, y: Fraction, s: Fraction) -> Fraction:
    """Unique point of [x-r, x+r] intersected with [y-s, y+s] nearest to 0.

    Zero if the intersection straddles the origin, otherwise the endpoint of
    smaller modulus.
    """
    lo = max(x - r, y - s)
    hi = min(x + r, y + s)
    if lo > hi:
        raise EmptyIntersection(f"[{x - r},{x + r}] and [{y - s},{y + s}] are disjoint")
    if lo <= 0 <= hi:
        return Fraction(0)
    return lo if lo > 0 else hi


def conical_bound(x: Point, y: Point, x2: Point, y2: Point, t: Fraction) -> Fraction:
    """(1-t) d(x,x') + t d(y,y'): the weak-convexity bound for geodesic pairs."""
    return (1 - t) * linf_dist(x, x2) + t * linf_dist(y, y2)


def mean_point(points: Sequence[Point]) -> Point:
    """Coordinatewise arithmetic mean (exact)."""
    if not points:
        raise ValueError("mean of no points")
    dim = len(points[0])
    n = len(points)
    return tuple(sum((p[k] for p in points), Fraction(0)) / n for k in range(dim))


def tuple_diameter(points: Sequence[Point]) -> Fraction:
    best = Fraction(0)
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            d = linf_dist(points[i], points[j])
            if d > best:
                best = d
    return best
