"""Planar fully grown n-level trees.

A tree is a chain of order-preserving surjections
``[r_n] -> [r_{n-1}] -> ... -> [r_1]``.  Levels are numbered 1..n from the
root upwards; vertex ``i`` of level ``j`` is the pair ``(j, i)``.  Level 1
hangs off an implicit root, so for ``n == 1`` the whole of ``[r_1]`` is a
single fibre.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations, product
from math import comb


class TreeError(ValueError):
    """Raised for malformed tree data."""


@dataclass(frozen=True)
class Tree:
    r: tuple[int, ...]
    maps: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "r", tuple(int(x) for x in self.r))
        object.__setattr__(self, "maps", tuple(tuple(int(v) for v in f) for f in self.maps))
        if len(self.r) < 1:
            raise TreeError("a tree needs at least one level")
        if any(x < 0 for x in self.r):
            raise TreeError(f"negative level size in r={self.r}")
        if len(self.maps) != len(self.r) - 1:
            raise TreeError(f"expected {len(self.r) - 1} level maps, got {len(self.maps)}")
        for j in range(2, len(self.r) + 1):
            f = self.maps[j - 2]
            if len(f) != self.r[j - 1] + 1:
                raise TreeError(f"level {j}: map has length {len(f)}, expected {self.r[j - 1] + 1}")
            if any(b < a for a, b in zip(f, f[1:])):
                raise TreeError(f"level {j}: map {list(f)} is not order-preserving")
            if f[0] != 0 or f[-1] != self.r[j - 2] or any(b - a > 1 for a, b in zip(f, f[1:])):
                raise TreeError(f"level {j}: map {list(f)} is not surjective onto [{self.r[j - 2]}]")

    def __lt__(self, other: Tree) -> bool:
        return (self.r, self.maps) < (other.r, other.maps)

    def __repr__(self) -> str:
        return f"Tree(r={list(self.r)}, maps={[list(f) for f in self.maps]})"

    @property
    def n(self) -> int:
        return len(self.r)

    def size(self, j: int) -> int:
        """Number of vertices on level ``j``."""
        return self.r[j - 1] + 1

    def f(self, j: int) -> tuple[int, ...]:
        """The map from level ``j`` to level ``j - 1`` (``2 <= j <= n``)."""
        return self.maps[j - 2]

    def parent(self, j: int, i: int) -> int:
        """Parent of vertex ``(j, i)``; 0 for level-1 vertices (the root)."""
        return 0 if j == 1 else self.maps[j - 2][i]

    @cached_property
    def _starts(self) -> tuple[tuple[int, ...], ...]:
        # _starts[j-1][p] = first level-j vertex over parent p, with a sentinel.
        out = [(0, self.r[0] + 1)]
        for j in range(2, self.n + 1):
            f = self.maps[j - 2]
            starts = [0] * (self.r[j - 2] + 2)
            for x in range(len(f) - 1, -1, -1):
                starts[f[x]] = x
            starts[-1] = len(f)
            out.append(tuple(starts))
        return tuple(out)

    def fibre(self, j: int, p: int) -> range:
        """Level-``j`` vertices lying over level ``j - 1`` vertex ``p``."""
        s = self._starts[j - 1]
        return range(s[p], s[p + 1])

    def fibres(self, j: int) -> list[range]:
        """All fibres of level ``j`` in left-to-right order."""
        parents = 1 if j == 1 else self.r[j - 2] + 1
        return [self.fibre(j, p) for p in range(parents)]

    def children(self, j: int, i: int) -> range:
        return self.fibre(j + 1, i)

    def fibre_of(self, j: int, i: int) -> range:
        """The fibre containing vertex ``(j, i)``."""
        return self.fibre(j, self.parent(j, i))

    def descendants(self, j: int, i: int, level: int) -> range:
        """Vertices of ``level`` above ``(j, i)`` (contiguous)."""
        lo = hi = i
        for l in range(j + 1, level + 1):
            lo = self.fibre(l, lo).start
            hi = self.fibre(l, hi).stop - 1
        return range(lo, hi + 1)

    @property
    def degree(self) -> int:
        return degree(self)

    @property
    def homological_degree(self) -> int:
        return homological_degree(self)

    def to_json(self) -> dict:
        return {"r": list(self.r), "maps": [list(f) for f in self.maps]}


def degree(t: Tree) -> int:
    """Number of edges, ``sum(r_j + 1)``."""
    return sum(x + 1 for x in t.r)


def homological_degree(t: Tree) -> int:
    return sum(t.r)


def linear_tree(n: int) -> Tree:
    return Tree((0,) * n, tuple((0,) for _ in range(n - 1)))


def corolla(n: int, leaves: int) -> Tree:
    """A linear stem of ``n - 1`` levels carrying ``leaves`` leaves on top."""
    if leaves < 1:
        raise TreeError("a corolla needs at least one leaf")
    r = (0,) * (n - 1) + (leaves - 1,)
    maps = tuple((0,) for _ in range(n - 2))
    if n >= 2:
        maps += ((0,) * leaves,)
    return Tree(r, maps)


def edge_labels(t: Tree) -> dict[tuple[int, int], int]:
    """Depth-first edge numbering: edge to a child, then the child's subtree."""
    labels: dict[tuple[int, int], int] = {}
    stack = [(1, i) for i in reversed(range(t.size(1)))]
    k = 0
    while stack:
        j, i = stack.pop()
        k += 1
        labels[(j, i)] = k
        if j < t.n:
            stack.extend((j + 1, c) for c in reversed(t.children(j, i)))
    return labels


def sign_exponent(t: Tree, j: int, i: int) -> int:
    """Label of the rightmost top edge of the subtree rooted at ``(j, i)``."""
    if not (1 <= j <= t.n and 0 <= i <= t.r[j - 1]):
        raise TreeError(f"vertex ({j}, {i}) out of range for {t!r}")
    leaf = t.descendants(j, i, t.n)[-1]
    return _labels(t)[(t.n, leaf)]


@lru_cache(maxsize=None)
def _labels(t: Tree) -> dict[tuple[int, int], int]:
    return edge_labels(t)


def subtree(t: Tree, j: int, i: int) -> Tree:
    """The ``(n - j)``-level tree of everything above vertex ``(j, i)``."""
    if not 1 <= j <= t.n - 1:
        raise TreeError(f"subtree needs 1 <= j <= n-1, got j={j} for n={t.n}")
    if not 0 <= i <= t.r[j - 1]:
        raise TreeError(f"vertex ({j}, {i}) out of range")
    ranges = [t.descendants(j, i, l) for l in range(j + 1, t.n + 1)]
    r = tuple(len(rg) - 1 for rg in ranges)
    maps = []
    for k in range(1, len(ranges)):
        l = j + 1 + k
        lo = ranges[k - 1].start
        maps.append(tuple(t.f(l)[x] - lo for x in ranges[k]))
    return Tree(r, tuple(maps))


def subtree_degree(t: Tree, j: int, i: int) -> int:
    """Edge count of the subtree above ``(j, i)``; 0 for a leaf."""
    return sum(len(t.descendants(j, i, l)) for l in range(j + 1, t.n + 1))


def surviving(t: Tree, leaves) -> list[list[int]]:
    """Per level (index ``j - 1``), sorted vertices below the given leaves."""
    levels = [sorted(set(leaves))]
    for j in range(t.n, 1, -1):
        f = t.f(j)
        levels.append(sorted({f[x] for x in levels[-1]}))
    return levels[::-1]


def restrict(t: Tree, leaves) -> Tree:
    """Restriction of ``t`` to the edges connecting ``leaves`` with the root."""
    leaves = sorted(set(leaves))
    if not leaves:
        raise TreeError("cannot restrict to an empty leaf set")
    if leaves[0] < 0 or leaves[-1] > t.r[-1]:
        raise TreeError(f"leaf set {leaves} out of range [{t.r[-1]}]")
    keep = surviving(t, leaves)
    r = tuple(len(v) - 1 for v in keep)
    maps = []
    for j in range(2, t.n + 1):
        pos = {v: k for k, v in enumerate(keep[j - 2])}
        maps.append(tuple(pos[t.f(j)[x]] for x in keep[j - 1]))
    return Tree(r, tuple(maps))


@lru_cache(maxsize=None)
def surjections(a: int, b: int) -> tuple[tuple[int, ...], ...]:
    """All order-preserving surjections ``[a] -> [b]``, lexicographically."""
    if b > a:
        return ()
    out = []
    for jumps in combinations(range(1, a + 1), b):
        js = set(jumps)
        f, v = [], 0
        for x in range(a + 1):
            if x in js:
                v += 1
            f.append(v)
        out.append(tuple(f))
    return tuple(sorted(out))


def count_trees(r) -> int:
    return _prod(comb(r[j], r[j - 1]) if r[j] >= r[j - 1] else 0 for j in range(1, len(r)))


def _prod(xs) -> int:
    out = 1
    for x in xs:
        out *= x
    return out


@lru_cache(maxsize=None)
def _enumerate_trees(r: tuple[int, ...]) -> tuple[Tree, ...]:
    per_level = [surjections(r[j], r[j - 1]) for j in range(1, len(r))]
    return tuple(Tree(r, maps) for maps in product(*per_level))


def enumerate_trees(n: int, r) -> list[Tree]:
    """All trees with signature ``r = (r_1, ..., r_n)``, lexicographic on maps."""
    r = tuple(r)
    if len(r) != n:
        raise TreeError(f"signature {r} does not have {n} levels")
    return list(_enumerate_trees(r))


def signatures(n: int, m: int) -> list[tuple[int, ...]]:
    """Nondecreasing ``(r_1, ..., r_n)`` with sum ``m`` in lexicographic order."""
    out: list[tuple[int, ...]] = []

    def rec(prefix, lo, left, k):
        if k == 0:
            if left == 0:
                out.append(tuple(prefix))
            return
        for x in range(lo, left // k + 1) if k > 1 else [left] if left >= lo else []:
            rec(prefix + [x], x, left - x, k - 1)

    rec([], 0, m, n)
    return out


@lru_cache(maxsize=None)
def _by_degree(n: int, m: int) -> tuple[Tree, ...]:
    return tuple(t for sig in signatures(n, m) for t in _enumerate_trees(sig))


def enumerate_by_degree(n: int, m: int) -> list[Tree]:
    """All ``n``-level trees of homological degree ``m``, grouped by signature."""
    return list(_by_degree(n, m))


def tree_from_json(data) -> Tree:
    if isinstance(data, str):
        data = json.loads(data)
    if not isinstance(data, dict) or "r" not in data:
        raise TreeError(f"tree literal must be an object with key 'r': {data!r}")
    return Tree(tuple(data["r"]), tuple(tuple(f) for f in data.get("maps") or ()))
