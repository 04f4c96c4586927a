"""Greedy harmonic labelings of trees whose vertices all have degree >= 3.

Each step takes the shallowest labeled vertex whose children are still free
and labels those children so that the vertex becomes harmonic:

* one-level step (vertex with >= 3 free children): all children but two get
  fill values, one gets an escape value, the last is forced by harmonicity;
* two-level step (vertex with exactly 2 free children, i.e. degree 3): the
  first child ``c`` and its children are labeled together. ``c``'s children
  get fill values plus one escape value ``a`` chosen so that the value of
  ``c`` (their mean with the parent) is an integer; the sibling of ``c`` is
  forced.

Fill values are the unused integers of least absolute value, which makes the
labeling surjective in the limit. Escape values dominate everything labeled
so far, which keeps every forced value new.
"""
from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from typing import Mapping

from .graph import ROOT, TreeAddress, address_key, child_count, parse_address, tree_neighbors
from .labeling import DuplicateLabel, PartialLabeling, check_harmonic, full_interior


class InvalidTreeSpec(ValueError):
    pass


@dataclass(frozen=True)
class TreeSpec:
    """Degree function of a tree: override by address, then by depth, then default."""

    default: int
    by_depth: tuple[int, ...] = ()
    overrides: tuple[tuple[TreeAddress, int], ...] = ()

    def __post_init__(self) -> None:
        degrees = [self.default, *self.by_depth, *(d for _, d in self.overrides)]
        for d in degrees:
            if not isinstance(d, int) or isinstance(d, bool) or d < 3:
                raise InvalidTreeSpec(f"every degree must be an integer >= 3, got {d!r}")
        object.__setattr__(self, "_override_map", dict(self.overrides))

    @classmethod
    def regular(cls, d: int) -> TreeSpec:
        return cls(d)

    @property
    def is_regular(self) -> bool:
        return not self.by_depth and not self.overrides

    def degree(self, addr: TreeAddress) -> int:
        addr = tuple(addr)
        over: Mapping = self._override_map  # type: ignore[attr-defined]
        if addr in over:
            return over[addr]
        if len(addr) < len(self.by_depth):
            return self.by_depth[len(addr)]
        return self.default

    def children(self, addr: TreeAddress) -> int:
        return child_count(addr, self.degree(addr))

    def neighbors(self, addr: TreeAddress) -> list:
        return tree_neighbors(self.degree)(addr)

    @classmethod
    def from_dict(cls, data: object) -> TreeSpec:
        if not isinstance(data, dict) or "default" not in data:
            raise InvalidTreeSpec('tree spec must be an object with key "default"')
        try:
            overrides = tuple(
                sorted((parse_address(k), v) for k, v in data.get("overrides", {}).items())
            )
            by_depth = tuple(data.get("by_depth", ()))
        except (ValueError, AttributeError, TypeError) as exc:
            raise InvalidTreeSpec(str(exc)) from exc
        return cls(data["default"], by_depth, overrides)

    def to_dict(self) -> dict:
        return {
            "default": self.default,
            "by_depth": list(self.by_depth),
            "overrides": {address_key(a): d for a, d in self.overrides},
        }

    @classmethod
    def from_json(cls, text: str) -> TreeSpec:
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InvalidTreeSpec(f"invalid JSON: {exc}") from exc


# ---------------------------------------------------------------------------
# Fill values
# ---------------------------------------------------------------------------


def fill_order(i: int) -> int:
    """The i-th integer in the order 0, 1, -1, 2, -2, ..."""
    return (i + 1) // 2 if i % 2 else -(i // 2)


def next_fill_value(used, start: int = 0) -> tuple[int, int]:
    """Unused integer of least absolute value (nonnegative first on ties).

    Returns ``(value, index)`` where ``index`` is its position in
    :func:`fill_order`; callers that only ever add labels may resume the
    scan from that index.
    """
    i = start
    while fill_order(i) in used:
        i += 1
    return fill_order(i), i


# ---------------------------------------------------------------------------
# Construction state
# ---------------------------------------------------------------------------


@dataclass
class StepRecord:
    vertex: TreeAddress
    kind: str  # "one-level" | "two-level"
    fills: list[int]
    escape: int
    forced: list[int]
    prior_max: int
    retries: int


@dataclass
class FrontierState:
    spec: TreeSpec
    labeling: PartialLabeling = field(default_factory=PartialLabeling)
    frontier: list = field(default_factory=list)  # heap of (depth, address)
    fill_cursor: int = 0
    abs_sum: int = 0
    max_abs: int = 0
    steps: int = 0
    fill_count: int = 0
    log: list[StepRecord] = field(default_factory=list)

    @classmethod
    def start(cls, spec: TreeSpec) -> FrontierState:
        state = cls(spec)
        root_value = state._take_fill()
        state._put(ROOT, root_value)
        heapq.heappush(state.frontier, (0, ROOT))
        return state

    def _take_fill(self) -> int:
        value, self.fill_cursor = next_fill_value(self.labeling.labels(), self.fill_cursor)
        return value

    def _put(self, v: TreeAddress, label: int) -> None:
        self.labeling.insert(v, label)
        self.abs_sum += abs(label)
        self.max_abs = max(self.max_abs, abs(label))

    def _drop(self, v: TreeAddress) -> None:
        label = self.labeling.remove(v)
        self.abs_sum -= abs(label)

    def peek(self) -> TreeAddress:
        return self.frontier[0][1]

    def used_consistent(self) -> bool:
        return self.labeling.is_consistent() and self.abs_sum == sum(
            abs(x) for x in self.labeling.labels()
        )


def forced_value(degree: int, value: int, parent_value: int, siblings) -> int:
    """Last child value making a vertex harmonic: ``deg*f - f' - sum(others)``."""
    return degree * value - parent_value - sum(siblings)


def escape_magnitude(multiplier: int, abs_sum: int, step: int) -> int:
    return multiplier * abs_sum + step


def adjust_residue(a: int, target: int, modulus: int) -> int:
    """Grow ``|a|`` by less than ``modulus`` until ``a = target (mod modulus)``."""
    sign = 1 if a >= 0 else -1
    while (a - target) % modulus:
        a += sign
    return a


def _sign(step: int) -> int:
    return 1 if step % 2 else -1


def _parent_value(state: FrontierState, v: TreeAddress) -> int:
    return state.labeling[v[:-1]] if v else 0


def _one_level(state: FrontierState, v: TreeAddress) -> StepRecord:
    deg = state.spec.degree(v)
    c = child_count(v, deg)
    f, g = state.labeling[v], _parent_value(state, v)
    kids = [v + (i,) for i in range(c)]
    fills = []
    for kid in kids[:-2]:
        m = state._take_fill()
        state._put(kid, m)
        fills.append(m)
    prior_max = state.max_abs
    # |a| > (2*deg) * prior_max keeps the forced value beyond every prior label
    mag = escape_magnitude(2 * deg + 1, state.abs_sum, state.steps)
    retries = 0
    while True:
        a = _sign(state.steps) * mag
        b = forced_value(deg, f, g, fills + [a])
        try:
            state._put(kids[-2], a)
        except DuplicateLabel:
            retries, mag = retries + 1, 2 * mag
            continue
        try:
            state._put(kids[-1], b)
        except DuplicateLabel:
            state._drop(kids[-2])
            retries, mag = retries + 1, 2 * mag
            continue
        break
    assert abs(a) > 2 * prior_max and abs(b) > prior_max, (a, b, prior_max)
    for kid in kids:
        heapq.heappush(state.frontier, (len(kid), kid))
    return StepRecord(v, "one-level", fills, a, [b], prior_max, retries)


def _two_level(state: FrontierState, v: TreeAddress) -> StepRecord:
    deg = state.spec.degree(v)
    f, g = state.labeling[v], _parent_value(state, v)
    work, sibling = v + (0,), v + (1,)
    work_deg = state.spec.degree(work)
    grandkids = [work + (i,) for i in range(work_deg - 1)]
    fills = []
    for kid in grandkids[:-1]:
        m = state._take_fill()
        state._put(kid, m)
        fills.append(m)
    prior_max = state.max_abs
    mag = escape_magnitude(work_deg * (deg + 3) + 1, state.abs_sum, state.steps)
    retries = 0
    while True:
        a = adjust_residue(_sign(state.steps) * mag, -(f + sum(fills)), work_deg)
        b = (a + f + sum(fills)) // work_deg
        s = forced_value(deg, f, g, [b])
        placed = []
        try:
            for vertex, label in ((grandkids[-1], a), (work, b), (sibling, s)):
                state._put(vertex, label)
                placed.append(vertex)
        except DuplicateLabel:
            for vertex in placed:
                state._drop(vertex)
            retries, mag = retries + 1, 2 * mag
            continue
        break
    assert abs(a) > 2 * prior_max and abs(b) > prior_max and abs(s) > prior_max, (a, b, s)
    heapq.heappush(state.frontier, (len(sibling), sibling))
    for kid in grandkids:
        heapq.heappush(state.frontier, (len(kid), kid))
    return StepRecord(v, "two-level", fills, a, [b, s], prior_max, retries)


def _step(state: FrontierState, kind: str | None = None) -> FrontierState:
    _, v = heapq.heappop(state.frontier)
    state.steps += 1
    c = state.spec.children(v)
    if kind == "two-level" and c != 2:
        heapq.heappush(state.frontier, (len(v), v))
        state.steps -= 1
        raise ValueError(f"two-level step needs a vertex with 2 free children, {address_key(v)} has {c}")
    rec = _one_level(state, v) if c >= 3 else _two_level(state, v)
    state.fill_count += len(rec.fills)
    state.log.append(rec)
    return state


def extend(state: FrontierState) -> FrontierState:
    """One construction step at the shallowest open vertex."""
    return _step(state)


def extend_regular(state: FrontierState, d: int) -> FrontierState:
    """One-level step in a d-regular tree, d >= 4."""
    if d < 4:
        raise ValueError("one-level steps need degree >= 4 (use extend_threeregular for d = 3)")
    if state.spec.degree(state.peek()) != d:
        raise ValueError(f"next open vertex does not have degree {d}")
    return _step(state)


def extend_threeregular(state: FrontierState) -> FrontierState:
    """Two-level step at a degree-3 non-root vertex (the root step is one-level)."""
    v = state.peek()
    if state.spec.degree(v) != 3:
        raise ValueError("next open vertex does not have degree 3")
    return _step(state, None if v == ROOT else "two-level")


def grow_tree(spec: TreeSpec, steps: int) -> FrontierState:
    if steps < 0:
        raise ValueError("steps must be non-negative")
    state = FrontierState.start(spec)
    for _ in range(steps):
        extend(state)
    return state


def label_tree(spec: TreeSpec, steps: int) -> PartialLabeling:
    return grow_tree(spec, steps).labeling


def tree_violations(state: FrontierState) -> list:
    nbrs = state.spec.neighbors
    return check_harmonic(state.labeling, full_interior(state.labeling, nbrs), nbrs)
