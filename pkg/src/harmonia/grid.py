"""Inductive construction of a harmonic labeling of Z^2.

A harmonic function on Z^2 is determined by its values on the rows y = -1
and y = 0; the values over x in [-n, n+1] determine it on the diamond S_n.
Level n+1 adds four spanning values: the two lower ones are fill values (the
nearest unattained negative and positive integers) and the two upper ones are
escape values that dwarf everything built so far. Injectivity is then checked
exactly on the new ring and the step is redone with larger escapes on a
collision.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple

from .graph import DiamondRegion, GridPoint, diamond_boundary, grid_neighbors, spanning_rows
from .labeling import DuplicateLabel, PartialLabeling, check_harmonic


class MissingDependency(KeyError):
    def __init__(self, point: GridPoint, needed: GridPoint):
        self.point = point
        self.needed = needed
        super().__init__(f"{tuple(point)} needs {tuple(needed)}, which is not labeled")


class RetriesExhausted(RuntimeError):
    pass


class BaseCollision(ValueError):
    """The base values collide with the fixed level-1 labels."""


class DigitBudgetExceeded(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Harmonic extension from the spanning rows
# ---------------------------------------------------------------------------


def dependencies(p: GridPoint) -> list[GridPoint]:
    """The four points whose values fix ``f(p)`` (below p if y >= 1, above if y <= -2)."""
    x, y = p
    if y >= 1:
        s = -1
    elif y <= -2:
        s = 1
    else:
        raise ValueError(f"{tuple(p)} lies on a spanning row; its value is free")
    return [GridPoint(x, y + s), GridPoint(x - 1, y + s), GridPoint(x + 1, y + s), GridPoint(x, y + 2 * s)]


def _extend_from(values: Mapping, p: GridPoint) -> int:
    c, left, right, far = dependencies(p)
    try:
        return 4 * values[c] - values[left] - values[right] - values[far]
    except KeyError as exc:
        raise MissingDependency(p, GridPoint(*exc.args[0])) from None


def extend_point(labeling: PartialLabeling, p: GridPoint) -> int:
    """``f(x,y) = 4f(x,y-1) - f(x-1,y-1) - f(x+1,y-1) - f(x,y-2)``, mirrored below the spanning rows."""
    p = GridPoint(*p)
    for q in dependencies(p):
        if q not in labeling:
            raise MissingDependency(p, q)
    return _extend_from(labeling, p)


def _region_order(n: int) -> list[GridPoint]:
    # rows moving away from the spanning pair; every dependency comes earlier
    region = DiamondRegion(n)
    order = []
    for h in range(1, n + 1):
        for y in (h, -1 - h):
            order.extend(GridPoint(x, y) for x in region.row_range(y))
    return order


def extend_region(labeling: PartialLabeling, n: int) -> PartialLabeling:
    """Label every point of S_n from the spanning rows, row by row.

    Points already labeled must agree with the extension.
    """
    for q in spanning_rows(n):
        if q not in labeling:
            raise MissingDependency(q, q)
    for p in _region_order(n):
        value = _extend_from(labeling, p)
        if p in labeling:
            if labeling[p] != value:
                raise ValueError(f"{tuple(p)} is labeled {labeling[p]}, extension gives {value}")
        else:
            labeling.insert(p, value)
    return labeling


def harmonic_extension_dfs(spanning: Mapping, n: int) -> dict[GridPoint, int]:
    """Harmonic extension to S_n computed depth-first from the tips of the diamond.

    Independent evaluation order used to cross-check :func:`extend_region`.
    """
    values: dict[GridPoint, int] = {GridPoint(*k): v for k, v in spanning.items()}
    for q in spanning_rows(n):
        if q not in values:
            raise MissingDependency(q, q)
    region = DiamondRegion(n)
    roots = [GridPoint(x, y) for y in (n, -n - 1) for x in region.row_range(y)]
    roots += [p for p in region if p not in values]
    for root in roots:
        stack = [root]
        while stack:
            p = stack[-1]
            if p in values:
                stack.pop()
                continue
            missing = [q for q in dependencies(p) if q not in values]
            if missing:
                stack.extend(missing)
            else:
                values[p] = _extend_from(values, p)
                stack.pop()
    return values


# ---------------------------------------------------------------------------
# Schedules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GrowthSchedule:
    """Base spanning values for level 1 and the escape escalation factor.

    At level n+1 the upper-left escape is ``factor * total`` and the
    upper-right escape is ``factor * (total + upper_left)``, where ``total``
    is the sum of |labels| on S_n. Each retry multiplies both by ``factor``.
    """

    base: tuple[int, int, int, int] = (10**7, 10**14, 10**21, 10**28)
    factor: int = 10**3
    max_retries: int = 8

    def __post_init__(self) -> None:
        v = self.base
        if len(v) != 4 or not all(isinstance(x, int) and x > 0 for x in v):
            raise ValueError("base must be four positive integers")
        if not v[0] < v[1] < v[2] < v[3]:
            raise ValueError("base values must be strictly increasing")
        if self.factor < 2:
            raise ValueError("escalation factor must be >= 2")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")

    def escapes(self, total: int, n1: int, n2: int, attempt: int) -> tuple[int, int]:
        boost = self.factor**attempt
        ul = self.factor * total * boost
        ur = self.factor * (total + ul) * boost
        return ul, ur


def factorial_digits(k: int) -> int:
    """Decimal digit count of ``k!``, from log-gamma (exact enough for budget checks)."""
    if k < 2:
        return 1
    return int(math.lgamma(k + 1) / math.log(10)) + 1


def iterated_factorial(k: int, depth: int, digit_budget: int) -> int:
    """``k`` followed by ``depth`` factorials; refuses values above the digit budget."""
    value = k
    for _ in range(depth):
        if len(str(value)) > 18 or factorial_digits(value) > digit_budget:
            raise DigitBudgetExceeded(
                f"factorial of a {len(str(value))}-digit number exceeds the {digit_budget}-digit budget"
            )
        value = math.factorial(value)
    return value


@dataclass(frozen=True)
class TowerSchedule:
    """Tower-valued schedule: base 10!, (10!)!, ((10!)!)!, (((10!)!)!)!; escapes
    10^(N2-N1+N3) and 10^(10^(N2-N1+N3)).

    "10!!" is read as the iterated factorial. Every value is checked against
    ``digit_budget`` before it is computed.
    """

    digit_budget: int = 10**6
    max_retries: int = 0

    @property
    def base(self) -> tuple[int, int, int, int]:
        return tuple(iterated_factorial(10, depth, self.digit_budget) for depth in (1, 2, 3, 4))

    def escapes(self, total: int, n1: int, n2: int, attempt: int) -> tuple[int, int]:
        e = n2 - n1 + total + attempt
        if e + 1 > self.digit_budget:
            raise DigitBudgetExceeded(f"10^{e} exceeds the {self.digit_budget}-digit budget")
        ul = 10**e
        if e > 18 or ul + 1 > self.digit_budget:
            raise DigitBudgetExceeded(f"10^(10^{e}) exceeds the {self.digit_budget}-digit budget")
        return ul, 10**ul


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


class DominanceRecord(NamedTuple):
    level: int
    new_min: int  # min |label| on the new upper edges
    prior_max: int  # max |label| on the previous diamond
    holds: bool


@dataclass
class GridState:
    n: int
    labeling: PartialLabeling
    schedule: object
    escapes: dict[int, tuple[int, int]] = field(default_factory=dict)
    abs_sum: int = 0
    max_abs: int = 0
    retries: int = 0
    dominance: list[DominanceRecord] = field(default_factory=list)
    _neg: int = -1
    _pos: int = 1

    @property
    def n1(self) -> int:
        """Largest negative integer not attained."""
        while self.labeling.has_label(self._neg):
            self._neg -= 1
        return self._neg

    @property
    def n2(self) -> int:
        """Smallest positive integer not attained."""
        while self.labeling.has_label(self._pos):
            self._pos += 1
        return self._pos

    @property
    def n3(self) -> int:
        """Sum of |labels| over the current diamond."""
        return self.abs_sum

    def value(self, p) -> int:
        return self.labeling[GridPoint(*p)]

    def region(self) -> DiamondRegion:
        return DiamondRegion(self.n)


def base_state(schedule=None) -> GridState:
    """Level 1: eight spanning values and the four derived ring values."""
    schedule = schedule or GrowthSchedule()
    v1, v2, v3, v4 = schedule.base
    assignments = [
        (diamond_boundary(0, "UL")[0], v1),
        (diamond_boundary(1, "UL")[0], v2),
        (diamond_boundary(0, "UR")[0], v3),
        (diamond_boundary(1, "UR")[0], v4),
        (diamond_boundary(0, "LL")[0], 0),
        (diamond_boundary(1, "LL")[0], -1),
        (diamond_boundary(0, "LR")[0], 1),
        (diamond_boundary(1, "LR")[0], 2),
    ]
    try:
        lab = PartialLabeling(assignments)
        extend_region(lab, 1)
    except DuplicateLabel as exc:
        raise BaseCollision(f"base {schedule.base} gives a repeated level-1 label: {exc}") from None
    state = GridState(1, lab, schedule)
    state.escapes = {0: (v1, v3), 1: (v2, v4)}
    state.abs_sum = sum(abs(x) for x in lab.labels())
    state.max_abs = max(abs(x) for x in lab.labels())
    return state


def _ring_order(n: int) -> list[GridPoint]:
    # new points of S_n (n >= 1) minus the four new spanning points, in dependency order
    pts = []
    for i in range(1, n + 1):
        pts += [diamond_boundary(n, "UL")[i], diamond_boundary(n, "UR")[i]]
        pts += [diamond_boundary(n, "LL")[i], diamond_boundary(n, "LR")[i]]
    return pts


def induction_step(state: GridState) -> GridState:
    """Advance from S_n to S_{n+1}."""
    n = state.n
    m = n + 1
    n1, n2, total = state.n1, state.n2, state.abs_sum
    prior_max = state.max_abs
    upper = set(diamond_boundary(m, "UL")) | set(diamond_boundary(m, "UR"))
    for attempt in range(state.schedule.max_retries + 1):
        ul, ur = state.schedule.escapes(total, n1, n2, attempt)
        placed = []
        try:
            for p, value in (
                (diamond_boundary(m, "LL")[0], n1),
                (diamond_boundary(m, "LR")[0], n2),
                (diamond_boundary(m, "UL")[0], ul),
                (diamond_boundary(m, "UR")[0], ur),
            ):
                state.labeling.insert(p, value)
                placed.append(p)
            for p in _ring_order(m):
                state.labeling.insert(p, _extend_from(state.labeling, p))
                placed.append(p)
        except DuplicateLabel:
            for p in placed:
                state.labeling.remove(p)
            state.retries += 1
            continue
        new_min = min(abs(state.labeling[p]) for p in upper)
        holds = new_min > 2 * prior_max
        if not holds:
            for p in placed:
                state.labeling.remove(p)
            state.retries += 1
            continue
        state.dominance.append(DominanceRecord(m, new_min, prior_max, holds))
        new_vals = [state.labeling[p] for p in placed]
        state.abs_sum += sum(abs(x) for x in new_vals)
        state.max_abs = max(prior_max, max(abs(x) for x in new_vals))
        state.escapes[m] = (ul, ur)
        state.n = m
        return state
    raise RetriesExhausted(
        f"level {m}: no collision-free escapes after {state.schedule.max_retries} retries"
    )


def build_grid_labeling(schedule=None, steps: int = 1) -> GridState:
    """Construct f on S_max(steps, 1); ``steps`` 0 and 1 both give the level-1 base."""
    if steps < 0:
        raise ValueError("steps must be non-negative")
    state = base_state(schedule)
    while state.n < steps:
        induction_step(state)
    return state


def grid_violations(state: GridState) -> list:
    return check_harmonic(state.labeling, state.region().interior(), grid_neighbors)


# ---------------------------------------------------------------------------
# Edge estimate diagnostics
# ---------------------------------------------------------------------------


class EstimateCheck(NamedTuple):
    side: str
    i: int
    value: int
    center: int
    scale: int  # the estimate allows |value - center| <= i/(i+1) * |scale|
    holds: bool


def _within(value: int, center: int, i: int, scale: int) -> bool:
    return (i + 1) * abs(value - center) <= i * abs(scale)


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


def check_edge_estimates(
    state: GridState, level: int | None = None, form: str = "cone"
) -> list[EstimateCheck]:
    """Two-sided estimates for the four edges of ring ``level`` (default: outermost).

    ``form="cone"`` uses centers whose terms all lie in the dependency cone of
    the point: the lower edges alternate as ``(-1)**i`` and each corner picks up
    the opposite escape of the previous level. ``form="variant"`` evaluates
    the variant with lower edges ``(-1)**(i+1)`` and corners using the
    same-level opposite escape, which the construction does not satisfy at
    the lower edges or the corners.

    Diagnostic only: a milder schedule may break the estimates while the
    labeling stays injective. Empty for levels below 2.
    """
    if form not in ("cone", "variant"):
        raise ValueError("form must be 'cone' or 'variant'")
    n = state.n if level is None else level
    if n < 2:
        return []
    if n > state.n:
        raise ValueError(f"level {n} not built yet (state is at {state.n})")
    variant = form == "variant"

    def ul0(k):
        return state.value(diamond_boundary(k, "UL")[0])

    def ur0(k):
        return state.value(diamond_boundary(k, "UR")[0])

    out = []
    for side, own, other in (("UL", ul0, ur0), ("UR", ur0, ul0)):
        pts = diamond_boundary(n, side)
        for i in range(1, n + 1):
            center = own(n) - 4 * i * own(n - 1)
            if i == n:
                center += other(n) if variant else other(n - 1)
            center *= _sign(i)
            v = state.value(pts[i])
            out.append(EstimateCheck(side, i, v, center, own(n - 1), _within(v, center, i, own(n - 1))))

    for side, own, other in (("LL", ul0, ur0), ("LR", ur0, ul0)):
        pts = diamond_boundary(n, side)
        for i in range(2, n + 1):
            if i < n:
                sign = _sign(i + 1) if variant else _sign(i)
                center = sign * (own(n - 1) - 4 * (i - 1) * own(n - 2))
                scale = own(n - 2)
            elif variant:
                center = _sign(n) * (own(n - 1) - 4 * n * own(n - 2) + other(n - 1))
                scale = ul0(n - 2)
            else:
                center = _sign(n) * (own(n - 1) - 4 * (n - 1) * own(n - 2) + other(n - 2))
                scale = own(n - 2)
            v = state.value(pts[i])
            out.append(EstimateCheck(side, i, v, center, scale, _within(v, center, i, scale)))
    return out


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------


def signed_log_magnitude(label: int) -> float:
    """``sign(label) * log10(1 + |label|)`` for arbitrarily large integers."""
    if label == 0:
        return 0.0
    return math.copysign(math.log10(abs(label) + 1), 1 if label > 0 else -1)


def heatmap_csv(state: GridState) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "signed_log10"])
    for p in state.region():
        w.writerow([p.x, p.y, f"{signed_log_magnitude(state.value(p)):.6f}"])
    return buf.getvalue()


def grid_key(p: Iterable[int]) -> list[int]:
    return [int(c) for c in p]


def parse_grid_key(v) -> GridPoint:
    if not isinstance(v, list) or len(v) != 2 or not all(isinstance(c, int) for c in v):
        raise ValueError(f"grid vertex must be [x, y], got {v!r}")
    return GridPoint(*v)
