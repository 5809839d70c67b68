"""Hyperconvexity predicates, witness searches, randomized refuters, and
Helly-order machinery over the max-norm and finite-metric backends.

Certificates are the contract: a refutation always carries a ball family
that re-verifies exactly (admissible, intersection certified empty), and a
randomized search that finds nothing reports "inconclusive", never "holds".
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product
from math import comb, gcd
from typing import Sequence

import numpy as np

from .errors import DimMismatch, HyperballError, SizeCapExceeded
from .linf import Ball, Box, FeasibilityResult, Point, balls_box, linf_dist
from .lp import EmptySet, HPolyhedron, lp_feasible
from .metric import FiniteMetricSpace, GraphInstance, graph_metric
from .rng import derive_seed, draw
from .reports import HOLDS, INCONCLUSIVE, REFUTED, PropertyReport
from .sets import (
    BoxUnion,
    FiniteSubset,
    subset_contains,
    subset_dist,
    subset_dim,
    subset_nonempty,
    subset_window,
)


class NotAdmissible(HyperballError):
    """Ball family violates an admissibility constraint."""


class CenterNotInA(HyperballError):
    """An inner ball center asserted to lie in the subset does not."""


class DimTooSmall(HyperballError):
    """Construction needs a larger ambient dimension."""


# ---------------------------------------------------------------------------
# Ball families and admissibility


@dataclass(frozen=True)
class LinfBallFamily:
    """Balls of the max norm, optionally tied to a subset constraint."""

    balls: tuple[Ball, ...]
    subset: object | None = None

    def __post_init__(self):
        if not self.balls:
            raise ValueError("family needs at least one ball")
        d = self.balls[0].dim
        for b in self.balls:
            if b.dim != d:
                raise DimMismatch("balls of different dims")
        if self.subset is not None and subset_dim(self.subset) != d:
            raise DimMismatch("subset dim does not match ball dim")

    @property
    def dim(self) -> int:
        return self.balls[0].dim

    def __len__(self) -> int:
        return len(self.balls)


@dataclass(frozen=True)
class FiniteBallFamily:
    """Balls given by center indices and radii inside a finite metric space."""

    space: FiniteMetricSpace
    items: tuple[tuple[int, Fraction], ...]
    subset: FiniteSubset | None = None

    def __post_init__(self):
        for i, r in self.items:
            if not (0 <= i < self.space.size):
                raise ValueError(f"center index {i} out of range")
            if r < 0:
                raise ValueError("radius must be >= 0")

    def __len__(self) -> int:
        return len(self.items)


@dataclass(frozen=True)
class AdmissibilityResult:
    ok: bool
    kind: str | None = None  # "pairwise" | "external"
    indices: tuple[int, ...] | None = None

    def __bool__(self) -> bool:
        return self.ok


def check_admissible(family: LinfBallFamily | FiniteBallFamily) -> AdmissibilityResult:
    """Exact pairwise admissibility d(x_i,x_j) <= r_i + r_j, plus
    d(x_i, A) <= r_i when the family carries a subset."""
    if isinstance(family, LinfBallFamily):
        balls = family.balls
        for i in range(len(balls)):
            for j in range(i + 1, len(balls)):
                if linf_dist(balls[i].center, balls[j].center) > balls[i].radius + balls[j].radius:
                    return AdmissibilityResult(False, "pairwise", (i, j))
        if family.subset is not None:
            for i, b in enumerate(balls):
                if subset_dist(family.subset, b.center) > b.radius:
                    return AdmissibilityResult(False, "external", (i,))
        return AdmissibilityResult(True)
    items = family.items
    d = family.space.d
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            (ci, ri), (cj, rj) = items[i], items[j]
            if d(ci, cj) > ri + rj:
                return AdmissibilityResult(False, "pairwise", (i, j))
    if family.subset is not None:
        for i, (c, r) in enumerate(items):
            if subset_dist(family.subset, c) > r:
                return AdmissibilityResult(False, "external", (i,))
    return AdmissibilityResult(True)


def hyperconvex_witness(family: LinfBallFamily | FiniteBallFamily) -> FeasibilityResult:
    """Common point of a pairwise-admissible family, or certified emptiness.

    Max-norm balls always intersect when admissible (per-coordinate interval
    arithmetic); the finite backend decides by exhaustive enumeration.
    """
    if family.subset is not None:
        raise ValueError("hyperconvex_witness takes a family without a subset")
    adm = check_admissible(family)
    if not adm:
        raise NotAdmissible(f"{adm.kind} violation at {adm.indices}")
    if isinstance(family, LinfBallFamily):
        from .linf import ball_family_intersection

        return ball_family_intersection(family.balls)
    d = family.space.d
    for v in range(family.space.size):
        if all(d(v, c) <= r for c, r in family.items):
            return FeasibilityResult("witness", witness=v)
    return FeasibilityResult(
        "infeasible", certificate={"checked": family.space.size}
    )


def external_witness(subset, family: LinfBallFamily | FiniteBallFamily) -> FeasibilityResult:
    """Point of subset inside every ball of an externally admissible family,
    or certified emptiness (a refutation certificate for external
    hyperconvexity at this family size)."""
    if not subset_nonempty(subset):
        raise EmptySet("subset is empty")
    if isinstance(family, FiniteBallFamily):
        if not isinstance(subset, FiniteSubset):
            raise TypeError("finite family needs a finite subset")
        adm = check_admissible(FiniteBallFamily(family.space, family.items, subset))
        if not adm:
            raise NotAdmissible(f"{adm.kind} violation at {adm.indices}")
        d = family.space.d
        for v in subset.indices:
            if all(d(v, c) <= r for c, r in family.items):
                return FeasibilityResult("witness", witness=v)
        return FeasibilityResult("infeasible", certificate={"checked": len(subset.indices)})
    adm = check_admissible(LinfBallFamily(family.balls, subset))
    if not adm:
        raise NotAdmissible(f"{adm.kind} violation at {adm.indices}")
    window = balls_box(family.balls)
    if isinstance(subset, Box):
        joint = subset.intersect(window)
        k = joint.first_empty_coordinate()
        if k is None:
            return FeasibilityResult("witness", witness=joint.lowest_corner())
        return FeasibilityResult("infeasible", certificate={"coordinate": k})
    if isinstance(subset, HPolyhedron):
        return lp_feasible(subset, family.balls)
    if isinstance(subset, BoxUnion):
        empties = []
        for member in subset.boxes:
            joint = member.intersect(window)
            k = joint.first_empty_coordinate()
            if k is None:
                return FeasibilityResult("witness", witness=joint.lowest_corner())
            empties.append(k)
        return FeasibilityResult("infeasible", certificate={"coordinates": tuple(empties)})
    raise TypeError(f"unsupported subset kind {type(subset).__name__}")


def weakly_external_witness(
    subset, x, r: Fraction, inner: LinfBallFamily | FiniteBallFamily
) -> FeasibilityResult:
    """Point of subset ∩ B(x, r) ∩ (inner balls), where inner centers lie in
    the subset and x is a single external center with d(x, subset) <= r."""
    if isinstance(inner, FiniteBallFamily):
        if not isinstance(subset, FiniteSubset):
            raise TypeError("finite family needs a finite subset")
        for c, _ in inner.items:
            if c not in subset.indices:
                raise CenterNotInA(f"inner center {c} not in subset")
        if subset_dist(subset, x) > r:
            raise NotAdmissible("d(x, A) > r")
        d = inner.space.d
        for i, (c, rc) in enumerate(inner.items):
            if d(x, c) > r + rc:
                raise NotAdmissible(f"d(x, x_{i}) > r + r_{i}")
        family = FiniteBallFamily(inner.space, ((x, r),) + inner.items, subset)
        adm = check_admissible(family)
        if not adm:
            raise NotAdmissible(f"{adm.kind} violation at {adm.indices}")
        return external_witness(subset, FiniteBallFamily(inner.space, family.items))
    for i, b in enumerate(inner.balls):
        if not subset_contains(subset, b.center):
            raise CenterNotInA(f"inner center {i} not in subset")
    if subset_dist(subset, x) > r:
        raise NotAdmissible("d(x, A) > r")
    for i, b in enumerate(inner.balls):
        if linf_dist(x, b.center) > r + b.radius:
            raise NotAdmissible(f"d(x, x_{i}) > r + r_{i}")
    family = LinfBallFamily((Ball(x, r),) + inner.balls, subset)
    adm = check_admissible(family)
    if not adm:
        raise NotAdmissible(f"{adm.kind} violation at {adm.indices}")
    return external_witness(subset, LinfBallFamily(family.balls))


def pad_family(family: LinfBallFamily, n: int) -> LinfBallFamily:
    """Pad to n balls by repeating the last ball (admissibility preserved)."""
    if n < len(family):
        raise ValueError("cannot pad downwards")
    extra = (family.balls[-1],) * (n - len(family))
    return LinfBallFamily(family.balls + extra, family.subset)


def verify_refutation(subset, balls: Sequence[Ball]) -> bool:
    """Exact re-verification: the family is externally admissible and its
    intersection with the subset is certifiably empty."""
    family = LinfBallFamily(tuple(balls), subset)
    if not check_admissible(family):
        return False
    result = external_witness(subset, LinfBallFamily(tuple(balls)))
    return not result.feasible


# ---------------------------------------------------------------------------
# Randomized refuter
#
# Sampling recipe (deterministic in (seed, candidate index); scalar and
# vectorized evaluations share it bit for bit):
#   slot 0                          family size k in [2, level]
#   slots 1 .. level*dim            center grid indices (first k*dim used)
#   next level slots                radius offsets in grid steps (first k used)
#   next level slots                tightening-order keys (first k used)
# Centers live on a dyadic grid over the subset's bounding window inflated by
# the arena scale E (the window diameter rounded up to a power of two); the
# grid step is E / 2**GRID_BITS.  Radii start at d(center, subset) plus an
# offset of up to RADIUS_STEPS grid steps, then every radius is shrunk to its
# minimal admissible value along the sampled order, which also repairs any
# initial pairwise violation.  A candidate refutes when the (now admissible)
# family has empty intersection with the subset.

GRID_BITS = 3
RADIUS_STEPS = 8
_INT64_GUARD = 1 << 52
_BATCH = 4096


@dataclass(frozen=True)
class _Arena:
    dim: int
    wlo: Point
    step: Fraction
    cells: tuple[int, ...]
    slots: int
    level: int


def _build_arena(subset, level: int, override: Box | None) -> _Arena:
    window = override if override is not None else subset_window(subset)
    dim = window.dim
    side = max(
        max((h - l for l, h in zip(window.lo, window.hi)), default=Fraction(1)),
        Fraction(1),
    )
    scale = Fraction(1)
    while scale < side:
        scale *= 2
    step = scale / (1 << GRID_BITS)
    wlo = []
    cells = []
    for lo_c, hi_c in zip(window.lo, window.hi):
        lo_i = (lo_c - scale) / step
        snapped = Fraction(lo_i.numerator // lo_i.denominator) * step
        wlo.append(snapped)
        span = (hi_c + scale) - snapped
        cells.append(int(span / step))
    slots = 1 + level * dim + level + level
    return _Arena(dim, tuple(wlo), step, tuple(cells), slots, level)


def _size_at(seed: int, base: int, level: int) -> int:
    if level <= 2:
        return 2
    return 2 + draw(seed, base) % (level - 1)


def _scalar_candidate(subset, arena: _Arena, seed: int, index: int):
    """Build candidate ``index`` with exact rationals: (balls, admissible)."""
    base = index * arena.slots
    level, dim = arena.level, arena.dim
    k = _size_at(seed, base, level)
    centers = []
    for i in range(k):
        coords = []
        for c in range(dim):
            j = draw(seed, base + 1 + i * dim + c) % (arena.cells[c] + 1)
            coords.append(arena.wlo[c] + j * arena.step)
        centers.append(tuple(coords))
    dists_to_a = [subset_dist(subset, p) for p in centers]
    off_base = base + 1 + level * dim
    radii = [
        dists_to_a[i] + (draw(seed, off_base + i) % (RADIUS_STEPS + 1)) * arena.step
        for i in range(k)
    ]
    key_base = off_base + level
    order = [i for _, i in sorted((draw(seed, key_base + i), i) for i in range(k))]
    pairwise = [[linf_dist(centers[i], centers[j]) for j in range(k)] for i in range(k)]
    for i in order:
        need = dists_to_a[i]
        for j in range(k):
            if j != i and pairwise[i][j] - radii[j] > need:
                need = pairwise[i][j] - radii[j]
        radii[i] = need
    return tuple(Ball(centers[i], radii[i]) for i in range(k))


def _scalar_scan(subset, arena: _Arena, seed: int, start: int, stop: int):
    for index in range(start, stop):
        balls = _scalar_candidate(subset, arena, seed, index)
        result = external_witness(subset, LinfBallFamily(balls))
        if not result.feasible:
            return index, balls
    return None


# -- vectorized exact screen (int64 over a common denominator) --------------


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


class _FastScreen:
    """Integer-exact batch evaluation of the sampling recipe.

    Every length is represented as value * unit over int64; the unit folds in
    all denominators in play (grid step, window corners, subset parameters,
    and the half-space dual-norm divisor), so no rounding ever happens.
    """

    def __init__(self, subset, arena: _Arena):
        self.arena = arena
        dens = [arena.step.denominator]
        dens += [w.denominator for w in arena.wlo]
        self.kind = None
        self.data: dict = {}
        if isinstance(subset, Box):
            self.kind = "box"
            dens += [v.denominator for v in subset.lo + subset.hi]
        elif isinstance(subset, BoxUnion):
            self.kind = "union"
            for b in subset.boxes:
                dens += [v.denominator for v in b.lo + b.hi]
        elif isinstance(subset, HPolyhedron) and len(subset.rows) == 1:
            self.kind = "halfspace"
            (a, b), = subset.rows
            row_scale = 1
            for v in a + (b,):
                row_scale = _lcm(row_scale, v.denominator)
            a_int = [int(v * row_scale) for v in a]
            b_int = int(b * row_scale)
            dens += [sum(abs(v) for v in a_int)]
            self.data["a_int"] = a_int
            self.data["b_int"] = b_int
            self.data["dual"] = sum(abs(v) for v in a_int)
        else:
            raise TypeError("no fast path for this subset kind")
        unit = 1
        for d in dens:
            unit = _lcm(unit, d)
        self.unit = unit
        self.step_i = int(arena.step * unit)
        self.wlo_i = np.array([int(w * unit) for w in arena.wlo], dtype=np.int64)
        self.cells = np.array(arena.cells, dtype=np.int64)
        if isinstance(subset, Box):
            self.data["lo"] = np.array([int(v * unit) for v in subset.lo], dtype=np.int64)
            self.data["hi"] = np.array([int(v * unit) for v in subset.hi], dtype=np.int64)
        elif isinstance(subset, BoxUnion):
            self.data["los"] = [
                np.array([int(v * unit) for v in b.lo], dtype=np.int64) for b in subset.boxes
            ]
            self.data["his"] = [
                np.array([int(v * unit) for v in b.hi], dtype=np.int64) for b in subset.boxes
            ]
        # magnitude guard: worst coordinate plus worst radius, times dual norm
        worst = max(
            abs(int(w)) + c * abs(self.step_i) for w, c in zip(self.wlo_i, self.cells)
        )
        worst_len = worst + (RADIUS_STEPS + 2) * abs(self.step_i) + worst
        if self.kind == "halfspace":
            worst_len *= sum(abs(v) for v in self.data["a_int"]) + abs(self.data["b_int"])
        if worst_len >= _INT64_GUARD:
            raise OverflowError("fast-path magnitudes would overflow int64")

    def _draws(self, seed: int, counters: np.ndarray) -> np.ndarray:
        z = (np.uint64(seed) + (counters + np.uint64(1)) * np.uint64(0x9E3779B97F4A7C15))
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))

    def dist_ints(self, coords: np.ndarray) -> np.ndarray:
        """d(center, subset) * unit for an (N, level, dim) int64 array."""
        if self.kind == "box":
            gap = np.maximum(self.data["lo"] - coords, coords - self.data["hi"])
            return np.maximum(gap, 0).max(axis=2)
        if self.kind == "union":
            best = None
            for lo, hi in zip(self.data["los"], self.data["his"]):
                gap = np.maximum(lo - coords, coords - hi)
                d = np.maximum(gap, 0).max(axis=2)
                best = d if best is None else np.minimum(best, d)
            return best
        a = np.array(self.data["a_int"], dtype=np.int64)
        margin = coords @ a - np.int64(self.data["b_int"]) * np.int64(self.unit)
        scaled = np.maximum(margin, 0)
        dual = np.int64(self.data["dual"])
        if np.any(scaled % dual):
            raise ArithmeticError("half-space distance left the integer lattice")
        return scaled // dual

    def empty_mask(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        """True where (combined ball box) ∩ subset = ∅; boxes are (N, dim)."""
        box_ok = np.all(lo <= hi, axis=1)
        if self.kind == "box":
            jlo = np.maximum(lo, self.data["lo"])
            jhi = np.minimum(hi, self.data["hi"])
            meets = np.all(jlo <= jhi, axis=1)
        elif self.kind == "union":
            meets = np.zeros(len(lo), dtype=bool)
            for mlo, mhi in zip(self.data["los"], self.data["his"]):
                jlo = np.maximum(lo, mlo)
                jhi = np.minimum(hi, mhi)
                meets |= np.all(jlo <= jhi, axis=1)
        else:
            a = np.array(self.data["a_int"], dtype=np.int64)
            corner = np.where(a > 0, lo, hi)
            meets = corner @ a <= np.int64(self.data["b_int"]) * np.int64(self.unit)
        return ~(box_ok & meets)

    def scan(self, seed: int, start: int, stop: int):
        """First candidate index in [start, stop) whose family screens empty."""
        arena = self.arena
        level, dim = arena.level, arena.dim
        for lo_idx in range(start, stop, _BATCH):
            hi_idx = min(lo_idx + _BATCH, stop)
            n = hi_idx - lo_idx
            base = (np.arange(lo_idx, hi_idx, dtype=np.uint64)) * np.uint64(arena.slots)
            sizes = (
                np.full(n, 2, dtype=np.int64)
                if level <= 2
                else 2 + (self._draws(seed, base) % np.uint64(level - 1)).astype(np.int64)
            )
            idx_counters = base[:, None] + np.uint64(1) + np.arange(level * dim, dtype=np.uint64)
            grid_idx = self._draws(seed, idx_counters).reshape(n, level, dim)
            grid_idx = (grid_idx % (self.cells + 1).astype(np.uint64)).astype(np.int64)
            coords = self.wlo_i + grid_idx * np.int64(self.step_i)
            dist_a = self.dist_ints(coords)
            off_counters = base[:, None] + np.uint64(1 + level * dim) + np.arange(level, dtype=np.uint64)
            offs = (self._draws(seed, off_counters) % np.uint64(RADIUS_STEPS + 1)).astype(np.int64)
            radii = dist_a + offs * np.int64(abs(self.step_i))
            key_counters = off_counters + np.uint64(level)
            keys = self._draws(seed, key_counters)
            order = np.argsort(keys, axis=1, kind="stable")
            active = np.arange(level)[None, :] < sizes[:, None]
            diff = np.abs(coords[:, :, None, :] - coords[:, None, :, :]).max(axis=3)
            neg = np.int64(-(1 << 60))
            pair_mask = active[:, :, None] & active[:, None, :]
            np.einsum("nii->ni", pair_mask)[:] = False
            rows = np.arange(n)
            for t in range(level):
                i_t = order[:, t]
                live = i_t < sizes
                gaps = np.where(pair_mask[rows, i_t, :], diff[rows, i_t, :] - radii, neg)
                need = np.maximum(gaps.max(axis=1), dist_a[rows, i_t])
                radii[rows, i_t] = np.where(live, need, radii[rows, i_t])
            radii = np.where(active, radii, 0)
            big = np.int64(1 << 60)
            lo_box = np.where(active[:, :, None], coords - radii[:, :, None], -big).max(axis=1)
            hi_box = np.where(active[:, :, None], coords + radii[:, :, None], big).min(axis=1)
            hits = np.nonzero(self.empty_mask(lo_box, hi_box))[0]
            if len(hits):
                return lo_idx + int(hits[0])
        return None


def _worker_ranges(budget: int, workers: int) -> list[tuple[int, int]]:
    chunk = -(-budget // workers)
    return [(w * chunk, min((w + 1) * chunk, budget)) for w in range(workers) if w * chunk < budget]


def refute_search(
    subset,
    level: int,
    budget: int,
    seed: int,
    mode: str = "external",
    arena: Box | None = None,
    workers: int | None = None,
    fast: bool = True,
) -> PropertyReport:
    """Seeded search for admissible families with empty intersection.

    Deterministic given (seed, budget): candidates are a pure function of the
    counter, so the outcome does not depend on the worker split.  A found
    family is re-verified exactly before being reported.
    """
    if level < 2:
        raise ValueError("level must be >= 2")
    if not subset_nonempty(subset):
        raise EmptySet("cannot refute over an empty subset")
    if budget <= 0:
        return PropertyReport(INCONCLUSIVE, seed=seed, budget_used=0, notes=("budget exhausted",))
    if isinstance(subset, FiniteSubset):
        return _refute_finite(subset, level, budget, seed, mode)
    if mode != "external":
        return _refute_scalar_modes(subset, level, budget, seed, mode, arena)
    built_arena = _build_arena(subset, level, arena)
    screen = None
    if fast:
        try:
            screen = _FastScreen(subset, built_arena)
        except (TypeError, OverflowError):
            screen = None
    workers = workers or int(os.environ.get("HYPERBALL_THREADS", "1") or "1")
    for start, stop in _worker_ranges(budget, max(1, workers)):
        if screen is not None:
            hit = screen.scan(seed, start, stop)
            found = None
            if hit is not None:
                balls = _scalar_candidate(subset, built_arena, seed, hit)
                found = (hit, balls)
        else:
            found = _scalar_scan(subset, built_arena, seed, start, stop)
        if found is not None:
            index, balls = found
            if not verify_refutation(subset, balls):
                raise HyperballError("screened refutation failed exact re-verification")
            return PropertyReport(
                REFUTED,
                certificate={"balls": balls, "index": index},
                seed=seed,
                budget_used=index + 1,
            )
    return PropertyReport(
        INCONCLUSIVE,
        seed=seed,
        budget_used=budget,
        notes=("no refutation found",),
    )


def _refute_scalar_modes(subset, level, budget, seed, mode, arena):
    """Center-in-subset variants ("hyperconvex", "weakly-external")."""
    if mode not in ("hyperconvex", "weakly-external"):
        raise ValueError(f"unknown mode {mode!r}")
    built = _build_arena(subset, level, arena)
    from .sets import subset_nearest

    for index in range(budget):
        balls = list(_scalar_candidate(subset, built, seed, index))
        start = 1 if mode == "weakly-external" else 0
        moved = []
        for i in range(start, len(balls)):
            center = balls[i].center
            if not subset_contains(subset, center):
                center = subset_nearest(subset, center)
            moved.append(center)
        rebuilt = []
        for i, b in enumerate(balls):
            if i < start:
                rebuilt.append(b)
            else:
                center = moved[i - start]
                rebuilt.append(Ball(center, subset_dist(subset, center) + b.radius))
        # re-tighten once in index order to restore minimal admissible radii
        centers = [b.center for b in rebuilt]
        radii = [b.radius for b in rebuilt]
        dists = [subset_dist(subset, c) for c in centers]
        for i in range(len(rebuilt)):
            need = dists[i]
            for j in range(len(rebuilt)):
                if j != i:
                    gap = linf_dist(centers[i], centers[j]) - radii[j]
                    if gap > need:
                        need = gap
            radii[i] = need
        family = tuple(Ball(c, r) for c, r in zip(centers, radii))
        result = external_witness(subset, LinfBallFamily(family))
        if not result.feasible:
            if not verify_refutation(subset, family):
                raise HyperballError("refutation failed exact re-verification")
            return PropertyReport(
                REFUTED,
                certificate={"balls": family, "index": index, "mode": mode},
                seed=seed,
                budget_used=index + 1,
            )
    return PropertyReport(
        INCONCLUSIVE, seed=seed, budget_used=budget, notes=("no refutation found", mode)
    )


def _refute_finite(subset: FiniteSubset, level, budget, seed, mode):
    space = subset.space
    values = sorted({d for row in space.dist for d in row})
    pool = tuple(range(space.size)) if mode == "external" else subset.indices
    for index in range(budget):
        base = index * (1 + 2 * level)
        k = _size_at(seed, base, level)
        centers = [pool[draw(seed, base + 1 + i) % len(pool)] for i in range(k)]
        dists = [subset_dist(subset, c) for c in centers]
        radii = [
            dists[i] + values[draw(seed, base + 1 + level + i) % len(values)]
            for i in range(k)
        ]
        for i in range(k):
            need = dists[i]
            for j in range(k):
                if j != i:
                    gap = space.d(centers[i], centers[j]) - radii[j]
                    if gap > need:
                        need = gap
            radii[i] = need
        family = FiniteBallFamily(space, tuple(zip(centers, radii)))
        result = external_witness(subset, family)
        if not result.feasible:
            return PropertyReport(
                REFUTED,
                certificate={"items": family.items, "index": index},
                seed=seed,
                budget_used=index + 1,
            )
    return PropertyReport(INCONCLUSIVE, seed=seed, budget_used=budget, notes=("no refutation found",))


# ---------------------------------------------------------------------------
# Helly machinery


@dataclass(frozen=True)
class HellyInstance:
    """n+1 half-spaces whose n-fold intersections are witnessed non-empty
    while the total intersection is empty."""

    dim: int
    halfspaces: tuple[HPolyhedron, ...]
    witnesses: tuple[Point, ...]

    def __post_init__(self):
        if len(self.halfspaces) != len(self.witnesses):
            raise ValueError("one witness per leave-one-out intersection")
        for j, w in enumerate(self.witnesses):
            for i, hs in enumerate(self.halfspaces):
                if i != j and not hs.contains(w):
                    raise ValueError(f"witness {j} fails set {i}")


def helly_counterexample(n: int) -> HellyInstance:
    """The optimal-order family: a chain of coordinate-difference half-spaces
    plus x_1 + x_2 <= -1, with witnesses whose entries are 0 and -5."""
    if n < 2:
        raise DimTooSmall("need dimension >= 2")
    F = Fraction
    rows: list[HPolyhedron] = []
    a1 = [F(0)] * n
    a1[n - 1] = F(-1)
    rows.append(HPolyhedron(n, ((tuple(a1), F(0)),)))
    for j in range(2, n + 1):
        a = [F(0)] * n
        a[n - j] = F(-1)  # x_{n-j+1} (1-based) gets -1
        a[n - j + 1] = F(1)
        rows.append(HPolyhedron(n, ((tuple(a), F(0)),)))
    last = [F(0)] * n
    last[0] = F(1)
    last[1] = F(1)
    rows.append(HPolyhedron(n, ((tuple(last), F(-1)),)))

    witnesses: list[Point] = []
    witnesses.append((F(0),) + (F(-5),) * (n - 1))
    if n == 2:
        witnesses.append((F(-5), F(0)))
    else:
        witnesses.append((F(0),) + (F(-5),) * (n - 2) + (F(0),))
    for j in range(3, n + 1):
        witnesses.append((F(-5),) * (n - j + 1) + (F(0),) * (j - 1))
    witnesses.append((F(0),) * n)
    return HellyInstance(n, tuple(rows), tuple(witnesses))


def helly_order_check(sets: Sequence[HPolyhedron], k: int) -> PropertyReport:
    """Check one family against the Helly-order-k template.

    If some k-fold intersection is empty the premise fails (vacuously holds);
    if all are non-empty and the total intersection is too, holds with a
    witness; otherwise refuted: the family is not a Helly family of order k.
    """
    if not sets:
        raise ValueError("empty family")
    dim = sets[0].dim
    k_witnesses = {}
    for idx in combinations(range(len(sets)), min(k, len(sets))):
        rows = tuple(r for i in idx for r in sets[i].rows)
        result = lp_feasible(HPolyhedron(dim, rows))
        if not result.feasible:
            return PropertyReport(
                HOLDS,
                certificate={"empty_k_subset": idx, **(result.certificate or {})},
                notes=("premise fails: a k-fold intersection is empty",),
            )
        k_witnesses[idx] = result.witness
    total_rows = tuple(r for s in sets for r in s.rows)
    total = lp_feasible(HPolyhedron(dim, total_rows))
    if total.feasible:
        return PropertyReport(
            HOLDS, certificate={"total_witness": total.witness, "k": k}
        )
    return PropertyReport(
        REFUTED,
        certificate={
            "k": k,
            "k_witnesses": k_witnesses,
            **(total.certificate or {}),
        },
        notes=("not a Helly family of this order",),
    )


GRAPH_ENUM_CAP = 5_000_000


def graph_n_helly_bruteforce(g: GraphInstance, n: int, cap: int = GRAPH_ENUM_CAP) -> PropertyReport:
    """Exhaustive integer-radius ball-Helly check on a connected graph.

    Enumerates all center multisets of size n and integer radii from 0 up to
    the (rounded-up) diameter: every pairwise-admissible family must share a
    vertex.  Balls of radius >= diameter are the whole space, so the cap on
    radii is exact, not an approximation.
    """
    space = graph_metric(g)
    V = space.size
    diam = space.diameter()
    radius_hi = int(-(-diam.numerator // diam.denominator))  # ceil
    families = comb(V + n - 1, n) * (radius_hi + 1) ** n
    if families > cap:
        raise SizeCapExceeded(f"{families} families exceed cap {cap}")
    d = space.dist
    for centers in combinations_with_replacement(range(V), n):
        for radii in product(range(radius_hi + 1), repeat=n):
            ok = True
            for i in range(n):
                for j in range(i + 1, n):
                    if d[centers[i]][centers[j]] > radii[i] + radii[j]:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                continue
            if not any(
                all(d[v][centers[i]] <= radii[i] for i in range(n)) for v in range(V)
            ):
                return PropertyReport(
                    REFUTED,
                    certificate={"centers": centers, "radii": radii},
                )
    return PropertyReport(HOLDS, certificate={"families": families})


# ---------------------------------------------------------------------------
# Ladder consistency


def four_to_n_consistency(
    subset, n_max: int, budget: int, seed: int, mode: str = "external"
) -> PropertyReport:
    """Search levels 4 and 5..n_max; flag THEOREM-INCONSISTENT only when a
    verified refutation needs more than 4 balls while nothing of size <= 4
    was found anywhere.  On conforming subsets this must never fire, since a
    higher-level refutation implies a 4-ball one exists."""
    if budget <= 0:
        return PropertyReport(INCONCLUSIVE, seed=seed, budget_used=0, notes=("budget exhausted",))
    levels = [4] + list(range(5, n_max + 1))
    outcomes = {}
    small_refutation = False
    big_refutations = []
    used = 0
    for level in levels:
        report = refute_search(subset, level, budget, derive_seed(seed, level), mode=mode)
        used += report.budget_used or 0
        if report.refuted:
            cert = report.certificate
            size = len(cert["balls"] if "balls" in cert else cert["items"])
            outcomes[level] = {"verdict": report.verdict, "family_size": size}
            if size <= 4:
                small_refutation = True
            else:
                big_refutations.append(
                    (level, cert["balls"] if "balls" in cert else cert["items"])
                )
        else:
            outcomes[level] = {"verdict": report.verdict}
    if big_refutations and not small_refutation:
        level, balls = big_refutations[0]
        return PropertyReport(
            REFUTED,
            certificate={
                "flag": "THEOREM-INCONSISTENT",
                "level": level,
                "balls": balls,
                "outcomes": outcomes,
            },
            seed=seed,
            budget_used=used,
        )
    return PropertyReport(
        HOLDS,
        certificate={"outcomes": outcomes},
        seed=seed,
        budget_used=used,
        notes=("consistent",),
    )


def uniform_local_external_sample(
    subset, radius: Fraction, probes: Sequence[Point], budget: int, seed: int
) -> PropertyReport:
    """Sampled uniform local external hyperconvexity: around each probe point
    of the subset, search for refutations confined to the ball window."""
    for idx, probe in enumerate(probes):
        if not subset_contains(subset, probe):
            raise CenterNotInA(f"probe {idx} not in subset")
        window = Ball(probe, radius).to_box()
        local = _intersect_with_box(subset, window)
        if not subset_nonempty(local):
            continue
        report = refute_search(
            local, 2, budget, derive_seed(seed, idx), arena=window
        )
        if report.refuted:
            return PropertyReport(
                REFUTED,
                certificate={"probe": probe, **dict(report.certificate)},
                seed=seed,
            )
    return PropertyReport(INCONCLUSIVE, seed=seed, budget_used=budget * len(probes), notes=("no local refutation found",))


def _intersect_with_box(subset, box: Box):
    from .lp import box_to_polyhedron

    if isinstance(subset, Box):
        return subset.intersect(box)
    if isinstance(subset, BoxUnion):
        members = tuple(b.intersect(box) for b in subset.boxes)
        keep = tuple(b for b in members if not b.is_empty()) or members[:1]
        return BoxUnion(keep)
    if isinstance(subset, HPolyhedron):
        return HPolyhedron(subset.dim, subset.rows + box_to_polyhedron(box).rows)
    raise TypeError(f"unsupported subset kind {type(subset).__name__}")
