"""Finite graphs, Laplacians, and the coordinate geometry of the infinite graphs.

Infinite graphs (the grid, regular trees, slabs G x Z) are never materialized;
their vertices are coordinates and their adjacency is a neighbor function.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, NamedTuple, Sequence


class GraphError(ValueError):
    """Malformed graph input."""


@dataclass(frozen=True)
class FiniteGraph:
    """Undirected simple graph on vertices ``0..n-1``."""

    n: int
    edges: frozenset[tuple[int, int]] = frozenset()
    _adj: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 0:
            raise GraphError(f"vertex count must be a non-negative integer, got {self.n!r}")
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in self.edges:
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise GraphError(f"edge ({i}, {j}) out of range for n={self.n}")
            if i >= j:
                raise GraphError(f"edge ({i}, {j}) not normalized (need i < j)")
            adj[i].append(j)
            adj[j].append(i)
        object.__setattr__(self, "_adj", tuple(tuple(sorted(a)) for a in adj))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> FiniteGraph:
        """Build from an edge list; rejects self-loops and duplicate edges."""
        seen: set[tuple[int, int]] = set()
        for e in edges:
            if len(e) != 2:
                raise GraphError(f"edge {e!r} must have two endpoints")
            i, j = e
            if not all(isinstance(v, int) and not isinstance(v, bool) for v in (i, j)):
                raise GraphError(f"edge {e!r} has non-integer endpoints")
            if i == j:
                raise GraphError(f"self-loop at vertex {i}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
        return cls(n, frozenset(seen))

    @classmethod
    def edgeless(cls, n: int) -> FiniteGraph:
        return cls(n)

    @classmethod
    def complete(cls, n: int) -> FiniteGraph:
        return cls(n, frozenset((i, j) for i in range(n) for j in range(i + 1, n)))

    @classmethod
    def path(cls, n: int) -> FiniteGraph:
        return cls(n, frozenset((i, i + 1) for i in range(n - 1)))

    @classmethod
    def cycle(cls, n: int) -> FiniteGraph:
        if n < 3:
            raise GraphError("a simple cycle needs at least 3 vertices")
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def components(self) -> list[list[int]]:
        """Connected components, each sorted, ordered by smallest vertex."""
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            stack, comp = [s], []
            while stack:
                v = stack.pop()
                comp.append(v)
                for w in self._adj[v]:
                    if not seen[w]:
                        seen[w] = True
                        stack.append(w)
            comps.append(sorted(comp))
        return comps

    def to_dict(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.sorted_edges()]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: object) -> FiniteGraph:
        if not isinstance(data, dict) or "n" not in data:
            raise GraphError('graph JSON must be an object with key "n"')
        edges = data.get("edges", [])
        if not isinstance(edges, list):
            raise GraphError('"edges" must be a list of [i, j] pairs')
        for e in edges:
            if not isinstance(e, list):
                raise GraphError(f"edge {e!r} must be a list [i, j]")
        return cls.from_edges(data["n"], edges)

    @classmethod
    def from_json(cls, text: str) -> FiniteGraph:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)


def laplacian(g: FiniteGraph) -> list[list[int]]:
    """Combinatorial Laplacian ``D - Adj`` as exact integer rows."""
    L = [[0] * g.n for _ in range(g.n)]
    for i in range(g.n):
        L[i][i] = g.degree(i)
        for j in g.neighbors(i):
            L[i][j] = -1
    return L


# ---------------------------------------------------------------------------
# Square grid Z^2 and the diamond regions S_n
# ---------------------------------------------------------------------------


class GridPoint(NamedTuple):
    x: int
    y: int


SIDES = ("UL", "UR", "LL", "LR")


def diamond_boundary(n: int, side: str) -> list[GridPoint]:
    """The ``n+1`` points of one edge of the level-``n`` ring, ordered by ``i``."""
    if n < 0:
        raise ValueError("region index must be non-negative")
    if side == "UL":
        return [GridPoint(-n + i, i) for i in range(n + 1)]
    if side == "UR":
        return [GridPoint(n + 1 - i, i) for i in range(n + 1)]
    if side == "LL":
        return [GridPoint(-n + i, -i - 1) for i in range(n + 1)]
    if side == "LR":
        return [GridPoint(n - i + 1, -i - 1) for i in range(n + 1)]
    raise ValueError(f"unknown side {side!r}; expected one of {SIDES}")


def ring(n: int) -> list[GridPoint]:
    """All points added at level ``n``: S_n minus S_{n-1}."""
    return [p for side in SIDES for p in diamond_boundary(n, side)]


def spanning_rows(n: int) -> list[GridPoint]:
    """Rows y=-1 and y=0 over x in [-n, n+1]; these determine f on S_n."""
    if n < 0:
        raise ValueError("region index must be non-negative")
    xs = range(-n, n + 2)
    return [GridPoint(x, -1) for x in xs] + [GridPoint(x, 0) for x in xs]


def _row_height(y: int) -> int:
    # distance of row y from the spanning pair {-1, 0}
    return y if y >= 0 else -1 - y


@dataclass(frozen=True)
class DiamondRegion:
    """S_n: the points of Z^2 determined by the spanning rows over [-n, n+1]."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("region index must be non-negative")

    def __contains__(self, p: object) -> bool:
        x, y = p  # type: ignore[misc]
        h = _row_height(y)
        return -self.n + h <= x <= self.n + 1 - h

    def row_range(self, y: int) -> range:
        h = _row_height(y)
        return range(-self.n + h, self.n + 2 - h)

    def rows(self) -> list[int]:
        return list(range(-self.n - 1, self.n + 1))

    def __iter__(self) -> Iterator[GridPoint]:
        for y in self.rows():
            for x in self.row_range(y):
                yield GridPoint(x, y)

    def __len__(self) -> int:
        return 2 * (self.n + 1) * (self.n + 2)

    def interior(self) -> list[GridPoint]:
        """Points of S_n all of whose four neighbors lie in S_n."""
        return [p for p in self if all(q in self for q in grid_neighbors(p))]


def grid_neighbors(p: Sequence[int]) -> list[GridPoint]:
    x, y = p
    return [GridPoint(x - 1, y), GridPoint(x + 1, y), GridPoint(x, y - 1), GridPoint(x, y + 1)]


def line_neighbors(z: int) -> list[int]:
    return [z - 1, z + 1]


# ---------------------------------------------------------------------------
# Trees: vertices addressed by child-index paths from a root
# ---------------------------------------------------------------------------

TreeAddress = tuple  # tuple[int, ...]; () is the root

ROOT: TreeAddress = ()


def address_key(addr: Sequence[int]) -> str:
    """``()`` -> ``"r"``, ``(0, 2)`` -> ``"r.0.2"``."""
    return "r" + "".join(f".{i}" for i in addr)


def parse_address(key: str) -> TreeAddress:
    parts = key.split(".")
    if parts[0] != "r":
        raise ValueError(f"tree address must start with 'r': {key!r}")
    try:
        path = tuple(int(p) for p in parts[1:])
    except ValueError as exc:
        raise ValueError(f"bad tree address {key!r}") from exc
    if any(i < 0 for i in path):
        raise ValueError(f"bad tree address {key!r}")
    return path


def child_count(addr: TreeAddress, degree: int) -> int:
    return degree if len(addr) == 0 else degree - 1


def tree_neighbors(degree_of: Callable[[TreeAddress], int]) -> Callable[[TreeAddress], list]:
    """Neighbor function of the tree whose vertex degrees are ``degree_of``."""

    def neighbors(addr: TreeAddress) -> list:
        addr = tuple(addr)
        c = child_count(addr, degree_of(addr))
        out = [addr[:-1]] if addr else []
        out.extend(addr + (i,) for i in range(c))
        return out

    return neighbors


def valid_address(addr: TreeAddress, degree_of: Callable[[TreeAddress], int]) -> bool:
    for depth, i in enumerate(addr):
        parent = tuple(addr[:depth])
        if not 0 <= i < child_count(parent, degree_of(parent)):
            return False
    return True


# ---------------------------------------------------------------------------
# Slabs G x Z
# ---------------------------------------------------------------------------


def slab_neighbors(g: FiniteGraph) -> Callable[[tuple[int, int]], list[tuple[int, int]]]:
    """Neighbor function on G x Z with vertices ``(a, z)``."""

    def neighbors(v: tuple[int, int]) -> list[tuple[int, int]]:
        a, z = v
        return [(a, z - 1), (a, z + 1)] + [(b, z) for b in g.neighbors(a)]

    return neighbors
