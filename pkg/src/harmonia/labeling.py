"""Partial labelings with exact integer labels, and the checks that make a
labeling harmonic, injective and (on a window) surjective."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Any, Callable, Hashable, Iterable, Iterator, NamedTuple


class LabelingError(Exception):
    pass


class DuplicateLabel(LabelingError):
    """A label is already carried by another vertex; the collision witness."""

    def __init__(self, label: int, existing: Hashable, vertex: Hashable):
        self.label = label
        self.existing = existing
        self.vertex = vertex
        super().__init__(f"label {label} already used by {existing!r} (inserting {vertex!r})")


class VertexAlreadyLabeled(LabelingError):
    pass


class UnlabeledNeighbor(LabelingError):
    def __init__(self, vertex: Hashable, neighbor: Hashable):
        self.vertex = vertex
        self.neighbor = neighbor
        super().__init__(f"neighbor {neighbor!r} of {vertex!r} has no label")


def _check_label(label: object) -> int:
    if not isinstance(label, int) or isinstance(label, bool):
        raise TypeError(f"labels are exact integers, got {type(label).__name__}")
    return label


class PartialLabeling:
    """Bidirectional vertex <-> label map.

    Both directions are kept in lockstep, so the map is injective by
    construction: inserting a label that is already in use raises
    :class:`DuplicateLabel` and leaves the labeling unchanged.
    """

    def __init__(self, items: Iterable[tuple[Hashable, int]] = ()):
        self._fwd: dict[Hashable, int] = {}
        self._rev: dict[int, Hashable] = {}
        for v, label in items:
            self.insert(v, label)

    def insert(self, vertex: Hashable, label: int) -> None:
        label = _check_label(label)
        if vertex in self._fwd:
            raise VertexAlreadyLabeled(f"{vertex!r} already labeled {self._fwd[vertex]}")
        if label in self._rev:
            raise DuplicateLabel(label, self._rev[label], vertex)
        self._fwd[vertex] = label
        self._rev[label] = vertex

    def remove(self, vertex: Hashable) -> int:
        label = self._fwd.pop(vertex)
        del self._rev[label]
        return label

    def __getitem__(self, vertex: Hashable) -> int:
        return self._fwd[vertex]

    def get(self, vertex: Hashable, default: Any = None) -> Any:
        return self._fwd.get(vertex, default)

    def vertex_of(self, label: int) -> Hashable:
        return self._rev[label]

    def has_label(self, label: int) -> bool:
        return label in self._rev

    def __contains__(self, vertex: object) -> bool:
        return vertex in self._fwd

    def __len__(self) -> int:
        return len(self._fwd)

    def __iter__(self) -> Iterator[Hashable]:
        return iter(self._fwd)

    def items(self):
        return self._fwd.items()

    def labels(self):
        return self._rev.keys()

    def copy(self) -> PartialLabeling:
        new = PartialLabeling()
        new._fwd = dict(self._fwd)
        new._rev = dict(self._rev)
        return new

    def is_consistent(self) -> bool:
        """Forward and reverse maps are mutual inverses."""
        return len(self._fwd) == len(self._rev) and all(
            self._rev.get(lab) == v for v, lab in self._fwd.items()
        )

    def __repr__(self) -> str:
        return f"PartialLabeling({len(self)} vertices)"


# ---------------------------------------------------------------------------
# Harmonicity
# ---------------------------------------------------------------------------


class Violation(NamedTuple):
    vertex: Hashable
    scaled_value: int  # deg(x) * phi(x)
    neighbor_sum: int


def check_harmonic(
    labeling: PartialLabeling,
    interior: Iterable[Hashable],
    neighbor_fn: Callable[[Hashable], list],
) -> list[Violation]:
    """Vertices of ``interior`` where ``deg(x)*phi(x) != sum of neighbors``.

    Raises :class:`UnlabeledNeighbor` if any required value is missing.
    """
    out = []
    for v in interior:
        if v not in labeling:
            raise UnlabeledNeighbor(v, v)
        total = 0
        nbrs = neighbor_fn(v)
        for w in nbrs:
            lab = labeling.get(w)
            if lab is None:
                raise UnlabeledNeighbor(v, w)
            total += lab
        lhs = len(nbrs) * labeling[v]
        if lhs != total:
            out.append(Violation(v, lhs, total))
    return out


def full_interior(labeling: PartialLabeling, neighbor_fn: Callable[[Hashable], list]) -> list:
    """Labeled vertices whose whole neighborhood is labeled."""
    return [v for v in labeling if all(w in labeling for w in neighbor_fn(v))]


# ---------------------------------------------------------------------------
# Coverage (windowed surjectivity)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoverageReport:
    bound: int
    attained: int
    gaps: tuple[int, ...]
    density: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["gaps"] = list(self.gaps)
        return d


def coverage(labeling: PartialLabeling, bound: int) -> CoverageReport:
    if bound < 0:
        raise ValueError("window bound must be non-negative")
    gaps = tuple(z for z in range(-bound, bound + 1) if not labeling.has_label(z))
    width = 2 * bound + 1
    attained = width - len(gaps)
    return CoverageReport(bound, attained, gaps, attained / width)


def covers_interval(labeling: PartialLabeling, lo: int, hi: int) -> bool:
    return all(labeling.has_label(z) for z in range(lo, hi + 1))


# ---------------------------------------------------------------------------
# The infinite cross: four rays glued at a center
# ---------------------------------------------------------------------------


class NonPositive(ValueError):
    pass


class CrossWitness(NamedTuple):
    position_on_a: int
    position_on_b: int
    value: int


CROSS_CENTER = ("o", 0)


def cross_arms(a: int, b: int, c: int, length: int) -> dict[str, list[int]]:
    """Values on the four arms of a harmonic function on the cross, center 0.

    ``arms[name][k]`` is the value at distance ``k`` from the center. The
    fourth first-value is forced by harmonicity at the center; every arm
    vertex has degree 2, so each arm continues by ``next = 2*cur - prev``.
    """
    firsts = {"a": a, "b": b, "c": c, "d": -a - b - c}
    arms = {}
    for name, first in firsts.items():
        vals = [0, first]
        while len(vals) <= length:
            vals.append(2 * vals[-1] - vals[-2])
        arms[name] = vals[: length + 1]
    return arms


def cross_collision_witness(a: int, b: int, c: int) -> CrossWitness:
    """Positions on arms ``a`` and ``b`` that both carry ``a*b``."""
    if a <= 0 or b <= 0:
        raise NonPositive(f"need a > 0 and b > 0, got a={a}, b={b}")
    arms = cross_arms(a, b, c, max(a, b))
    assert arms["a"][b] == arms["b"][a] == a * b
    return CrossWitness(b, a, a * b)


def cross_labeling(a: int, b: int, c: int, length: int) -> PartialLabeling:
    """Insert the cross function arm by arm; raises DuplicateLabel on the first repeat."""
    arms = cross_arms(a, b, c, length)
    lab = PartialLabeling([(CROSS_CENTER, 0)])
    for name in "abcd":
        for k in range(1, length + 1):
            lab.insert((name, k), arms[name][k])
    return lab


def cross_neighbors(v: tuple[str, int]) -> list[tuple[str, int]]:
    name, k = v
    if v == CROSS_CENTER:
        return [(arm, 1) for arm in "abcd"]
    prev = CROSS_CENTER if k == 1 else (name, k - 1)
    return [prev, (name, k + 1)]


# ---------------------------------------------------------------------------
# Labeling JSON: [{"v": <vertex key>, "label": "<decimal>"}, ...]
# ---------------------------------------------------------------------------


def labeling_to_records(labeling: PartialLabeling, encode: Callable[[Hashable], Any]) -> list[dict]:
    return [{"v": encode(v), "label": str(lab)} for v, lab in labeling.items()]


def dumps_labeling(labeling: PartialLabeling, encode: Callable[[Hashable], Any]) -> str:
    return json.dumps(labeling_to_records(labeling, encode)) + "\n"


def parse_records(text: str, decode: Callable[[Any], Hashable]) -> list[tuple[Hashable, int]]:
    """Parse Labeling JSON into (vertex, label) pairs without enforcing injectivity."""
    data = json.loads(text)
    if not isinstance(data, list):
        raise LabelingError("labeling JSON must be a list of records")
    pairs = []
    for rec in data:
        if not isinstance(rec, dict) or "v" not in rec or "label" not in rec:
            raise LabelingError(f"bad record {rec!r}")
        lab = rec["label"]
        if not isinstance(lab, str):
            raise LabelingError(f"label must be a decimal string, got {lab!r}")
        try:
            value = int(lab)
        except ValueError as exc:
            raise LabelingError(f"bad label {lab!r}") from exc
        pairs.append((decode(rec["v"]), value))
    return pairs


def loads_labeling(text: str, decode: Callable[[Any], Hashable]) -> PartialLabeling:
    return PartialLabeling(parse_records(text, decode))
