"""Exact rational linear feasibility and minimization over H-polyhedra.

Two independent kernels:

* Fourier-Motzkin elimination for small systems (dim <= 6, <= 40 rows).
  Eliminations track nonnegative row multipliers, so an infeasible outcome
  carries a Farkas certificate that re-verifies by plain arithmetic.
* A dense exact-pivot simplex (Bland's rule, Fractions throughout) for
  everything larger; phase-1 duals supply the Farkas certificate there.

Every witness is checked against every constraint before it is returned,
and every infeasibility certificate is checked to actually prove
infeasibility.  A failure of either check is a kernel bug and raises.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DimMismatch, HyperballError
from .linf import Ball, Box, FeasibilityResult, Point, linf_dist

Row = tuple[tuple[Fraction, ...], Fraction]  # a . x <= b

FM_MAX_DIM = 6
FM_MAX_ROWS = 40
_FM_ROW_BLOWUP = 4000


class EmptySet(HyperballError):
    """An operation that needs a non-empty set got an empty one."""


class LPKernelError(HyperballError):
    """Internal kernel failure (verification of its own output failed)."""


class _FMBlowup(Exception):
    pass


class _Infeasible(Exception):
    def __init__(self, lam):
        self.lam = lam


@dataclass(frozen=True)
class HPolyhedron:
    """Intersection of half-spaces a . x <= b; may be empty or unbounded."""

    dim: int
    rows: tuple[Row, ...]

    def __post_init__(self):
        for a, _ in self.rows:
            if len(a) != self.dim:
                raise DimMismatch("row length does not match polyhedron dim")

    def contains(self, p: Point) -> bool:
        if len(p) != self.dim:
            raise DimMismatch("point dim does not match polyhedron dim")
        return all(sum(c * x for c, x in zip(a, p)) <= b for a, b in self.rows)


def halfspace(a: Sequence[object], b: object) -> HPolyhedron:
    return HPolyhedron(
        len(tuple(a)), ((tuple(Fraction(c) for c in a), Fraction(b)),)
    )


def box_to_polyhedron(box: Box) -> HPolyhedron:
    rows: list[Row] = []
    d = box.dim
    for k in range(d):
        unit = tuple(Fraction(1) if i == k else Fraction(0) for i in range(d))
        neg = tuple(-u for u in unit)
        rows.append((unit, box.hi[k]))
        rows.append((neg, -box.lo[k]))
    return HPolyhedron(d, tuple(rows))


def ball_rows(ball: Ball) -> list[Row]:
    """|x_k - c_k| <= r as 2*dim half-space rows."""
    d = ball.dim
    rows: list[Row] = []
    for k in range(d):
        unit = tuple(Fraction(1) if i == k else Fraction(0) for i in range(d))
        neg = tuple(-u for u in unit)
        rows.append((unit, ball.center[k] + ball.radius))
        rows.append((neg, -(ball.center[k] - ball.radius)))
    return rows


# ---------------------------------------------------------------------------
# Fourier-Motzkin


def _normalized(a, b, lam):
    scale = max((abs(c) for c in a if c != 0), default=None)
    if scale is None or scale == 1:
        return a, b, lam
    return tuple(c / scale for c in a), b / scale, tuple(x / scale for x in lam)


def _fm_solve(rows: Sequence[Row], dim: int):
    """Eliminate variables dim-1 .. 0, then back-substitute a witness.

    Returns ("witness", point) or ("infeasible", multipliers).  The witness
    picks the lowest admissible value per variable (the upper bound when only
    bounded above, 0 when free), assigning variable 0 first — callers that
    want an exact minimum place the objective variable at index 0.
    """
    n = len(rows)
    system = []
    for i, (a, b) in enumerate(rows):
        lam = tuple(Fraction(1 if t == i else 0) for t in range(n))
        system.append((tuple(a), Fraction(b), lam))

    def is_constant(a, b, lam) -> bool:
        if all(c == 0 for c in a):
            if b < 0:
                raise _Infeasible(lam)
            return True
        return False

    stages: list[list] = [[] for _ in range(dim)]
    try:
        current = [row for row in system if not is_constant(*row)]
        for v in range(dim - 1, -1, -1):
            stages[v] = current
            uppers, lowers = [], []
            bucket: dict = {}

            def add(a, b, lam):
                if is_constant(a, b, lam):
                    return
                a, b, lam = _normalized(a, b, lam)
                prev = bucket.get(a)
                if prev is None or b < prev[0]:
                    bucket[a] = (b, lam)

            for a, b, lam in current:
                c = a[v]
                if c > 0:
                    uppers.append((a, b, lam))
                elif c < 0:
                    lowers.append((a, b, lam))
                else:
                    add(a, b, lam)
            for au, bu, lu in uppers:
                cu = au[v]
                for al, bl, ll in lowers:
                    mu, ml = -al[v], cu  # both positive
                    a_new = tuple(mu * au[i] + ml * al[i] for i in range(dim))
                    b_new = mu * bu + ml * bl
                    lam_new = tuple(mu * x + ml * y for x, y in zip(lu, ll))
                    add(a_new, b_new, lam_new)
                    if len(bucket) > _FM_ROW_BLOWUP:
                        raise _FMBlowup
            current = [(a, b, lam) for a, (b, lam) in bucket.items()]
    except _Infeasible as stop:
        return "infeasible", stop.lam

    x: list[Fraction] = [Fraction(0)] * dim
    for v in range(dim):
        lo = hi = None
        for a, b, _ in stages[v]:
            c = a[v]
            if c == 0:
                continue
            bound = (b - sum(a[i] * x[i] for i in range(v))) / c
            if c > 0:
                hi = bound if hi is None else min(hi, bound)
            else:
                lo = bound if lo is None else max(lo, bound)
        if lo is not None and hi is not None and lo > hi:
            raise LPKernelError("FM back-substitution hit an empty interval")
        if lo is not None:
            x[v] = lo
        elif hi is not None:
            x[v] = hi
    return "witness", tuple(x)


def _fm_lower_bound_exists(rows: Sequence[Row], dim: int) -> bool:
    """Project onto variable 0 and report whether a lower bound survives."""
    system = {tuple(a): Fraction(b) for a, b in rows}
    for v in range(dim - 1, 0, -1):
        uppers, lowers, rest = [], [], {}
        for a, b in system.items():
            c = a[v]
            if c > 0:
                uppers.append((a, b))
            elif c < 0:
                lowers.append((a, b))
            else:
                rest[a] = b
        for au, bu in uppers:
            for al, bl in lowers:
                mu, ml = -al[v], au[v]
                a_new = tuple(mu * au[i] + ml * al[i] for i in range(dim))
                b_new = mu * bu + ml * bl
                prev = rest.get(a_new)
                if prev is None or b_new < prev:
                    rest[a_new] = b_new
                if len(rest) > _FM_ROW_BLOWUP:
                    raise _FMBlowup
        system = rest
    return any(a[0] < 0 for a in system)


# ---------------------------------------------------------------------------
# Exact simplex (Bland's rule)


class _Simplex:
    """Dense exact tableau for min c.x s.t. A x <= b with free x."""

    def __init__(self, rows: Sequence[Row], dim: int):
        self.dim = dim
        self.m = len(rows)
        self.nstruct = 2 * dim + self.m
        self.signs: list[int] = []
        self.art_col: dict[int, int] = {}
        ncols = self.nstruct
        for i, (_, b) in enumerate(rows):
            if b >= 0:
                self.signs.append(1)
            else:
                self.signs.append(-1)
                self.art_col[i] = ncols
                ncols += 1
        self.ncols = ncols
        self.T = [[Fraction(0)] * (ncols + 1) for _ in range(self.m)]
        self.basis: list[int] = []
        for i, (a, b) in enumerate(rows):
            sg = self.signs[i]
            row = self.T[i]
            for k in range(dim):
                row[k] = sg * a[k]
                row[dim + k] = -sg * a[k]
            row[2 * dim + i] = Fraction(sg)
            row[ncols] = sg * b
            if sg == 1:
                self.basis.append(2 * dim + i)
            else:
                row[self.art_col[i]] = Fraction(1)
                self.basis.append(self.art_col[i])

    def pivot(self, obj: list[Fraction], r: int, col: int) -> None:
        T = self.T
        piv = T[r][col]
        T[r] = [x / piv for x in T[r]]
        for i in range(self.m):
            if i != r and T[i][col] != 0:
                f = T[i][col]
                T[i] = [x - f * y for x, y in zip(T[i], T[r])]
        if obj[col] != 0:
            f = obj[col]
            for j in range(self.ncols + 1):
                obj[j] -= f * T[r][j]
        self.basis[r] = col

    def run(self, obj: list[Fraction]) -> str:
        while True:
            enter = next((j for j in range(self.nstruct) if obj[j] < 0), None)
            if enter is None:
                return "optimal"
            leave, best = None, None
            for r in range(self.m):
                if self.T[r][enter] > 0:
                    ratio = self.T[r][self.ncols] / self.T[r][enter]
                    if (
                        best is None
                        or ratio < best
                        or (ratio == best and self.basis[r] < self.basis[leave])
                    ):
                        best, leave = ratio, r
            if leave is None:
                return "unbounded"
            self.pivot(obj, leave, enter)

    def phase1(self):
        """Returns None when feasible, else Farkas multipliers."""
        if not self.art_col:
            return None
        obj = [Fraction(0)] * (self.ncols + 1)
        for col in self.art_col.values():
            obj[col] = Fraction(1)
        for r, col in enumerate(self.basis):
            if col >= self.nstruct:
                for j in range(self.ncols + 1):
                    obj[j] -= self.T[r][j]
        self.run(obj)
        if -obj[self.ncols] > 0:
            lam = []
            for i in range(self.m):
                if i in self.art_col:
                    y_i = Fraction(1) - obj[self.art_col[i]]
                else:
                    y_i = -obj[2 * self.dim + i]
                lam.append(-self.signs[i] * y_i)
            return tuple(lam)
        self._expel_artificials()
        return None

    def _expel_artificials(self) -> None:
        """Pivot basic artificials out (or drop redundant rows) so that the
        phase-2 iterations can never push an artificial positive again."""
        zero_obj = [Fraction(0)] * (self.ncols + 1)
        keep: list[int] = []
        for r in range(self.m):
            if self.basis[r] < self.nstruct:
                keep.append(r)
                continue
            col = next(
                (j for j in range(self.nstruct) if self.T[r][j] != 0), None
            )
            if col is None:
                continue  # 0 = 0 row: redundant, drop it
            self.pivot(zero_obj, r, col)
            keep.append(r)
        if len(keep) != self.m:
            self.T = [self.T[r] for r in keep]
            self.basis = [self.basis[r] for r in keep]
            self.m = len(keep)

    def phase2(self, objective: Sequence[Fraction]) -> str:
        obj = [Fraction(0)] * (self.ncols + 1)
        for k in range(self.dim):
            obj[k] = Fraction(objective[k])
            obj[self.dim + k] = -Fraction(objective[k])
        for r, col in enumerate(self.basis):
            if obj[col] != 0:
                f = obj[col]
                for j in range(self.ncols + 1):
                    obj[j] -= f * self.T[r][j]
        return self.run(obj)

    def point(self) -> Point:
        vals = {col: self.T[r][self.ncols] for r, col in enumerate(self.basis)}
        return tuple(
            vals.get(k, Fraction(0)) - vals.get(self.dim + k, Fraction(0))
            for k in range(self.dim)
        )


def _simplex_feasible(rows: Sequence[Row], dim: int):
    sx = _Simplex(rows, dim)
    lam = sx.phase1()
    if lam is not None:
        return "infeasible", lam
    return "witness", sx.point()


def _simplex_minimize(objective: Sequence[Fraction], rows: Sequence[Row], dim: int):
    sx = _Simplex(rows, dim)
    lam = sx.phase1()
    if lam is not None:
        return "infeasible", lam
    status = sx.phase2(objective)
    if status == "unbounded":
        return "unbounded", None
    x = sx.point()
    value = sum(Fraction(objective[k]) * x[k] for k in range(dim))
    return "optimal", value, x


# ---------------------------------------------------------------------------
# Public entry points


def _assemble(
    p: HPolyhedron | None, balls: Sequence[Ball], dim: int | None
) -> tuple[list[Row], int]:
    rows: list[Row] = []
    if p is not None:
        dim = p.dim if dim is None else dim
        if p.dim != dim:
            raise DimMismatch("polyhedron dim mismatch")
        rows.extend(p.rows)
    for ball in balls:
        dim = ball.dim if dim is None else dim
        if ball.dim != dim:
            raise DimMismatch("ball dim mismatch")
        rows.extend(ball_rows(ball))
    if dim is None:
        raise ValueError("cannot infer dimension from empty input")
    return rows, dim


def _verify_witness(rows: Sequence[Row], x: Point) -> None:
    for a, b in rows:
        if sum(c * v for c, v in zip(a, x)) > b:
            raise LPKernelError("witness fails a constraint")


def _verify_farkas(rows: Sequence[Row], lam: Sequence[Fraction]) -> None:
    if len(lam) != len(rows):
        raise LPKernelError("certificate length mismatch")
    if any(l < 0 for l in lam):
        raise LPKernelError("negative Farkas multiplier")
    dim = len(rows[0][0]) if rows else 0
    for k in range(dim):
        if sum(l * a[k] for l, (a, _) in zip(lam, rows)) != 0:
            raise LPKernelError("Farkas combination does not vanish")
    if sum(l * b for l, (_, b) in zip(lam, rows)) >= 0:
        raise LPKernelError("Farkas combination is not contradictory")


def lp_feasible(
    p: HPolyhedron | None,
    balls: Sequence[Ball] = (),
    kernel: str = "auto",
    dim: int | None = None,
) -> FeasibilityResult:
    """Exact feasibility of polyhedron rows plus ball (box) constraints."""
    rows, dim = _assemble(p, balls, dim)
    if not rows:
        return FeasibilityResult("witness", witness=tuple(Fraction(0) for _ in range(dim)))
    if kernel == "auto":
        kernel = "fm" if dim <= FM_MAX_DIM and len(rows) <= FM_MAX_ROWS else "simplex"
    if kernel == "fm":
        try:
            outcome = _fm_solve(rows, dim)
        except _FMBlowup:
            outcome = _simplex_feasible(rows, dim)
    elif kernel == "simplex":
        outcome = _simplex_feasible(rows, dim)
    else:
        raise ValueError(f"unknown kernel {kernel!r}")
    status, payload = outcome
    if status == "witness":
        _verify_witness(rows, payload)
        return FeasibilityResult("witness", witness=payload)
    _verify_farkas(rows, payload)
    return FeasibilityResult("infeasible", certificate={"farkas": tuple(payload)})


def lp_minimize(
    objective: Sequence[object],
    p: HPolyhedron | None,
    balls: Sequence[Ball] = (),
    kernel: str = "auto",
):
    """Minimize objective . x over the rows; returns ("optimal", value, point),
    ("unbounded", None) or ("infeasible", multipliers)."""
    c = tuple(Fraction(v) for v in objective)
    rows, dim = _assemble(p, balls, None)
    if not rows:
        if all(v == 0 for v in c):
            return "optimal", Fraction(0), tuple(Fraction(0) for _ in range(dim))
        return "unbounded", None
    if kernel == "auto":
        kernel = (
            "fm" if dim + 1 <= FM_MAX_DIM and len(rows) + 2 <= FM_MAX_ROWS else "simplex"
        )
    if kernel == "fm":
        # Auxiliary variable t = objective . x at index 0; FM assigns index 0
        # first from its exact projection, so the lowest pick is the minimum.
        ext_rows: list[Row] = [
            ((Fraction(-1),) + c, Fraction(0)),
            ((Fraction(1),) + tuple(-v for v in c), Fraction(0)),
        ]
        ext_rows.extend(((Fraction(0),) + tuple(a), b) for a, b in rows)
        try:
            outcome = _fm_solve(ext_rows, dim + 1)
            if outcome[0] == "infeasible":
                lam = tuple(outcome[1][2:])  # linking rows cancel pairwise
                _verify_farkas(rows, lam)
                return "infeasible", lam
            if not _fm_lower_bound_exists(ext_rows, dim + 1):
                return "unbounded", None
            sol = outcome[1]
            value, x = sol[0], sol[1:]
            if sum(c[k] * x[k] for k in range(dim)) != value:
                raise LPKernelError("objective link violated")
            _verify_witness(rows, x)
            return "optimal", value, x
        except _FMBlowup:
            kernel = "simplex"
    result = _simplex_minimize(c, rows, dim)
    if result[0] == "optimal":
        _verify_witness(rows, result[2])
    elif result[0] == "infeasible":
        _verify_farkas(rows, result[1])
    return result


def polyhedron_coordinate_bounds(
    p: HPolyhedron, k: int, kernel: str = "auto"
) -> tuple[Fraction | None, Fraction | None]:
    """Exact (min, max) of coordinate k over the set; None where unbounded."""
    unit = [Fraction(0)] * p.dim
    unit[k] = Fraction(1)
    low = lp_minimize(tuple(unit), p, kernel=kernel)
    high = lp_minimize(tuple(-u for u in unit), p, kernel=kernel)
    if low[0] == "infeasible" or high[0] == "infeasible":
        raise EmptySet("cannot bound an empty polyhedron")
    lo = low[1] if low[0] == "optimal" else None
    hi = -high[1] if high[0] == "optimal" else None
    return lo, hi


def dist_to_polyhedron(
    x: Point, p: HPolyhedron, kernel: str = "auto"
) -> tuple[Fraction, Point]:
    """Chebyshev distance from x to a non-empty polyhedron, with a nearest
    point, as the exact LP min r s.t. a in p, |x_k - a_k| <= r."""
    if len(x) != p.dim:
        raise DimMismatch("point dim does not match polyhedron dim")
    if not lp_feasible(p, kernel=kernel).feasible:
        raise EmptySet("polyhedron is empty")
    d = p.dim
    # Variables (r, a_0 .. a_{d-1}).
    rows: list[Row] = [((Fraction(0),) + tuple(a), b) for a, b in p.rows]
    for k in range(d):
        unit = [Fraction(0)] * d
        unit[k] = Fraction(1)
        rows.append(((Fraction(-1),) + tuple(unit), x[k]))
        rows.append(((Fraction(-1),) + tuple(-u for u in unit), -x[k]))
    if kernel == "auto":
        kernel = "fm" if d + 1 <= FM_MAX_DIM and len(rows) <= FM_MAX_ROWS else "simplex"
    if kernel == "fm":
        try:
            outcome = _fm_solve(rows, d + 1)
            if outcome[0] == "infeasible":
                raise LPKernelError("distance LP infeasible for non-empty set")
            sol = outcome[1]
            r, nearest = sol[0], sol[1:]
            _check_distance(x, p, r, nearest)
            return r, nearest
        except _FMBlowup:
            kernel = "simplex"
    objective = (Fraction(1),) + tuple(Fraction(0) for _ in range(d))
    status, value, sol = _simplex_minimize(objective, rows, d + 1)
    if status != "optimal":
        raise LPKernelError("distance LP did not reach an optimum")
    r, nearest = sol[0], sol[1:]
    _check_distance(x, p, r, nearest)
    return r, nearest


def _check_distance(x: Point, p: HPolyhedron, r: Fraction, nearest: Point) -> None:
    if not p.contains(nearest):
        raise LPKernelError("nearest point lies outside the set")
    if linf_dist(x, nearest) > r:
        raise LPKernelError("nearest point farther than reported distance")
