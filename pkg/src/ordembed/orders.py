"""Total preorders and linear orders on pair sets.

An order spec is a partition of the complete pair set D_n = {(i,j) : i<j}
or the bipartite pair set B_{n,m} = [n] x [m] into equivalence classes,
listed ascending: pairs in an earlier class get strictly smaller distances
than pairs in a later class. All indices are 1-based.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import (DuplicatePair, EmptyClass, IndexOutOfRange, MissingPair,
                     NotComplete, NotLinear, SpecError, UnknownPair)

Pair = tuple[int, int]


def complete_pairs(n: int) -> list[Pair]:
    """All pairs (i,j) with 1 <= i < j <= n, lexicographic."""
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def bipartite_pairs(n: int, m: int) -> list[Pair]:
    """All pairs (i,j) with i in [n], j in [m], lexicographic."""
    return [(i, j) for i in range(1, n + 1) for j in range(1, m + 1)]


@dataclass(frozen=True)
class OrderSpec:
    """A total preorder on D_n (kind 'complete') or B_{n,m} ('bipartite').

    classes[k] holds the pairs of rank k+1; rank 1 means smallest distance.
    """

    kind: str
    n: int
    classes: tuple[tuple[Pair, ...], ...]
    m: int | None = None
    _ranks: dict[Pair, int] = field(init=False, repr=False, compare=False,
                                    hash=False, default=None)

    def __post_init__(self):
        norm = []
        for cls in self.classes:
            cur = []
            for p in cls:
                i, j = int(p[0]), int(p[1])
                if self.kind == "complete" and i > j:
                    i, j = j, i
                cur.append((i, j))
            norm.append(tuple(cur))
        object.__setattr__(self, "classes", tuple(norm))
        ranks = {}
        for k, cls in enumerate(self.classes, start=1):
            for p in cls:
                if p not in ranks:
                    ranks[p] = k
        object.__setattr__(self, "_ranks", ranks)

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    def pair_set(self) -> list[Pair]:
        if self.kind == "complete":
            return complete_pairs(self.n)
        return bipartite_pairs(self.n, self.m)

    def rank_of(self, pair: Pair) -> int:
        """1-based rank of the class containing pair."""
        i, j = pair
        if self.kind == "complete" and i > j:
            i, j = j, i
        try:
            return self._ranks[(i, j)]
        except KeyError:
            raise UnknownPair(f"pair {pair} not in spec") from None

    def is_linear(self) -> bool:
        return all(len(cls) == 1 for cls in self.classes)


def validate(spec: OrderSpec) -> None:
    """Check the partition invariants; raise a SpecError naming the first
    offending pair on failure."""
    if spec.kind not in ("complete", "bipartite"):
        raise SpecError(f"unknown kind {spec.kind!r}")
    if spec.kind == "complete":
        if spec.n < 2:
            raise IndexOutOfRange(f"complete spec needs n >= 2, got {spec.n}")
        universe = set(complete_pairs(spec.n))
    else:
        if spec.m is None:
            raise SpecError("bipartite spec needs m")
        if spec.n < 1 or spec.m < 1:
            raise IndexOutOfRange("bipartite spec needs n, m >= 1")
        universe = set(bipartite_pairs(spec.n, spec.m))
    seen = set()
    for cls in spec.classes:
        if not cls:
            raise EmptyClass("empty class in spec")
        for p in cls:
            if p not in universe:
                raise IndexOutOfRange(f"pair {p} out of range")
            if p in seen:
                raise DuplicatePair(f"pair {p} occurs twice")
            seen.add(p)
    missing = universe - seen
    if missing:
        raise MissingPair(f"pair {min(missing)} not covered")


def rank_of(spec: OrderSpec, pair: Pair) -> int:
    return spec.rank_of(pair)


def is_linear(spec: OrderSpec) -> bool:
    return spec.is_linear()


def relabel_min_to_last(spec: OrderSpec) -> tuple[OrderSpec, dict[int, int]]:
    """Relabel the points of a complete linear spec so the unique minimal
    pair becomes (n-1, n).

    Returns the relabeled spec and the permutation sigma with
    sigma[original index] = new index. The minimal pair's endpoints map to
    n-1 and n; the remaining indices keep their relative order.
    """
    if spec.kind != "complete":
        raise NotComplete("relabel_min_to_last needs a complete spec")
    if not spec.is_linear():
        raise NotLinear("relabel_min_to_last needs a linear order")
    n = spec.n
    i1, j1 = spec.classes[0][0]
    sigma = {i1: n - 1, j1: n}
    rest = [i for i in range(1, n + 1) if i != i1 and i != j1]
    for slot, i in enumerate(rest, start=1):
        sigma[i] = slot
    classes = tuple(
        tuple(tuple(sorted((sigma[a], sigma[b]))) for a, b in cls)
        for cls in spec.classes
    )
    return OrderSpec("complete", n, classes), sigma


def canonical(spec: OrderSpec) -> OrderSpec:
    """Same preorder with the pairs inside each class sorted lexicographically."""
    return OrderSpec(spec.kind, spec.n,
                     tuple(tuple(sorted(cls)) for cls in spec.classes),
                     m=spec.m)


def to_json_dict(spec: OrderSpec) -> dict:
    out = {"kind": spec.kind, "n": spec.n}
    if spec.kind == "bipartite":
        out["m"] = spec.m
    out["classes"] = [[list(p) for p in cls] for cls in spec.classes]
    return out


def to_json(spec: OrderSpec) -> str:
    return json.dumps(to_json_dict(spec))


def from_json_dict(data: dict) -> OrderSpec:
    try:
        kind = data["kind"]
        n = int(data["n"])
        raw = data["classes"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"malformed spec: {exc}") from exc
    m = None
    if kind == "bipartite":
        if "m" not in data:
            raise SpecError("bipartite spec needs m")
        m = int(data["m"])
    classes = []
    for cls in raw:
        cur = []
        for p in cls:
            if not isinstance(p, (list, tuple)) or len(p) != 2:
                raise SpecError(f"malformed pair {p!r}")
            cur.append((int(p[0]), int(p[1])))
        classes.append(tuple(cur))
    spec = OrderSpec(kind, n, tuple(classes), m=m)
    validate(spec)
    return spec


def from_json(text: str) -> OrderSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON: {exc}") from exc
    return from_json_dict(data)


def load(path: str) -> OrderSpec:
    with open(path, encoding="utf-8") as fh:
        return from_json(fh.read())


def save(spec: OrderSpec, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_json(spec))
        fh.write("\n")
