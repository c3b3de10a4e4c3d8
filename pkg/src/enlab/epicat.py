"""Morphisms of the tree categories Epi_n and Epi_n^+.

A morphism stores one full representative ``(h_1, ..., h_n)``; the top map
may send leaves to the basepoint ``PLUS``.  Two representatives are the same
morphism when they delete the same leaves and agree on every vertex below a
surviving leaf, so identity is always decided through :func:`canonical_key`.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, combinations_with_replacement, product

from .trees import Tree, TreeError, surviving, restrict, subtree_degree

PLUS = -1


class MorphismError(ValueError):
    pass


@dataclass(frozen=True)
class TreeMorphism:
    source: Tree
    target: Tree
    levels: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(tuple(int(v) for v in h) for h in self.levels))

    @property
    def n(self) -> int:
        return self.source.n

    @property
    def top(self) -> tuple[int, ...]:
        return self.levels[-1]

    def level(self, j: int) -> tuple[int, ...]:
        return self.levels[j - 1]

    @property
    def deleted(self) -> tuple[int, ...]:
        return tuple(x for x, v in enumerate(self.top) if v == PLUS)

    @property
    def hits_plus(self) -> bool:
        return PLUS in self.top

    def to_json(self) -> dict:
        return {
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "levels": [list(h) for h in self.levels],
        }

    def __repr__(self) -> str:
        lv = ["".join("+" if v == PLUS else str(v) for v in h) for h in self.levels]
        return f"TreeMorphism({self.source.r}->{self.target.r}, levels={lv})"


@dataclass(frozen=True)
class Shuffle:
    """A ``(a, b)``-shuffle; ``perm[x]`` is the new position of element ``x``."""

    a: int
    b: int
    perm: tuple[int, ...]

    def __post_init__(self):
        if len(self.perm) != self.a + self.b or sorted(self.perm) != list(range(self.a + self.b)):
            raise MorphismError(f"{self.perm} is not a permutation of {self.a + self.b} elements")
        left, right = self.perm[: self.a], self.perm[self.a :]
        if list(left) != sorted(left) or list(right) != sorted(right):
            raise MorphismError(f"{self.perm} is not a ({self.a},{self.b})-shuffle")

    def inversions(self) -> list[tuple[int, int]]:
        """Pairs ``(x, y)`` with ``x`` left, ``y`` right and ``y`` placed first."""
        return [
            (x, y - self.a)
            for x in range(self.a)
            for y in range(self.a, self.a + self.b)
            if self.perm[x] > self.perm[y]
        ]


def identity(t: Tree) -> TreeMorphism:
    return TreeMorphism(t, t, tuple(tuple(range(t.size(j))) for j in range(1, t.n + 1)))


def parse_morphism(data) -> TreeMorphism:
    from .trees import tree_from_json

    if isinstance(data, str):
        data = json.loads(data)
    return TreeMorphism(
        tree_from_json(data["source"]), tree_from_json(data["target"]), tuple(tuple(h) for h in data["levels"])
    )


# -- validity and equivalence -------------------------------------------------


def validity_problems(h: TreeMorphism) -> list[str]:
    """Reasons ``h`` is not a valid representative (empty when valid)."""
    t, s, n = h.source, h.target, h.n
    if s.n != n:
        return [f"level counts differ: {n} vs {s.n}"]
    if len(h.levels) != n:
        return [f"expected {n} level maps, got {len(h.levels)}"]
    problems = []
    for j in range(1, n + 1):
        hj = h.level(j)
        if len(hj) != t.size(j):
            problems.append(f"level {j}: length {len(hj)} != {t.size(j)}")
    if problems:
        return problems
    for j in range(1, n + 1):
        hj = h.level(j)
        top = j == n
        allowed = set(range(s.size(j))) | ({PLUS} if top else set())
        bad = [v for v in hj if v not in allowed]
        if bad:
            problems.append(f"level {j}: values {bad} out of range")
            continue
        if set(range(s.size(j))) - set(hj):
            problems.append(f"level {j}: not surjective onto [{s.r[j - 1]}]")
        for fib in t.fibres(j):
            vals = [hj[x] for x in fib if hj[x] != PLUS]
            if any(b < a for a, b in zip(vals, vals[1:])):
                problems.append(f"level {j}: not order-preserving on fibre {list(fib)}")
            if top:
                kept = [x for x in fib if hj[x] != PLUS]
                if kept and kept[-1] - kept[0] + 1 != len(kept):
                    problems.append(f"level {j}: surviving leaves {kept} of fibre {list(fib)} not an interval")
        if j >= 2 and not bad:
            fr, fs, below = t.f(j), s.f(j), h.level(j - 1)
            for x in range(t.size(j)):
                if hj[x] != PLUS and fs[hj[x]] != below[fr[x]]:
                    problems.append(f"level {j}: square does not commute at vertex {x}")
                    break
    return problems


def is_valid(h: TreeMorphism) -> bool:
    return not validity_problems(h)


def survivors(h: TreeMorphism) -> list[list[int]]:
    kept = [x for x, v in enumerate(h.top) if v != PLUS]
    return surviving(h.source, kept)


def canonical_key(h: TreeMorphism):
    """Hashable key, equal exactly for equivalent representatives."""
    alive = survivors(h)
    restricted = tuple(tuple(h.level(j)[x] for x in alive[j - 1]) for j in range(1, h.n + 1))
    return (h.source, h.target, h.deleted, restricted)


def equivalent(h: TreeMorphism, g: TreeMorphism) -> bool:
    if h.source != g.source or h.target != g.target:
        raise MorphismError("equivalence is only defined for morphisms with equal endpoints")
    return canonical_key(h) == canonical_key(g)


def compose(g: TreeMorphism, h: TreeMorphism) -> TreeMorphism:
    """``h . g`` for ``g: q -> r`` and ``h: r -> s``; the basepoint is absorbing."""
    if g.target != h.source:
        raise MorphismError(f"cannot compose: target {g.target!r} != source {h.source!r}")
    levels = [tuple(hj[v] for v in gj) for gj, hj in zip(g.levels[:-1], h.levels[:-1])]
    levels.append(tuple(PLUS if v == PLUS else h.top[v] for v in g.top))
    return TreeMorphism(g.source, h.target, tuple(levels))


# -- generators ---------------------------------------------------------------


def _forest(t: Tree):
    """Nested ``[tags, children]`` nodes; tags are original vertex indices."""

    def node(j, i):
        kids = [node(j + 1, c) for c in t.children(j, i)] if j < t.n else []
        return [(i,), kids]

    return [node(1, i) for i in range(t.size(1))]


def _serialize(forest, n: int):
    """Tree and per-level tag -> new-index maps of a nested forest."""
    sizes, maps, index = [], [], []
    layer = forest
    for j in range(1, n + 1):
        idx = {}
        for k, (tags, _) in enumerate(layer):
            for tag in tags:
                idx[tag] = k
        index.append(idx)
        sizes.append(len(layer) - 1)
        if j < n:
            f, nxt = [], []
            for k, (_, kids) in enumerate(layer):
                f.extend([k] * len(kids))
                nxt.extend(kids)
            maps.append(tuple(f))
            layer = nxt
    return Tree(tuple(sizes), tuple(maps)), index


def _morphism_from(t: Tree, forest) -> TreeMorphism:
    target, index = _serialize(forest, t.n)
    levels = tuple(tuple(index[j].get(x, PLUS) for x in range(t.size(j + 1))) for j in range(t.n))
    return TreeMorphism(t, target, levels)


def _siblings(forest, j: int, i: int):
    """The child list holding vertex ``(j, i)`` and its position there."""
    layer = [(None, forest)]
    for _ in range(j - 1):
        layer = [(node, node[1]) for _, kids in layer for node in kids]
    for _, kids in layer:
        for pos, node in enumerate(kids):
            if i in node[0]:
                return kids, pos
    raise TreeError(f"vertex ({j}, {i}) not found")


def top_merge(t: Tree, i: int) -> TreeMorphism:
    """The morphism ``(d_i, id, ..., id)`` merging leaves ``i`` and ``i + 1``."""
    n = t.n
    if not 0 <= i < t.r[-1] or t.parent(n, i) != t.parent(n, i + 1):
        raise MorphismError(f"leaves {i} and {i + 1} are not in one fibre")
    forest = _forest(t)
    kids, pos = _siblings(forest, n, i)
    kids[pos : pos + 2] = [[(i, i + 1), []]]
    return _morphism_from(t, forest)


def delete_leaf(t: Tree, i: int) -> TreeMorphism:
    """The morphism ``(delta_i, id, ..., id)`` sending leaf ``i`` to the basepoint."""
    n = t.n
    if not 0 <= i <= t.r[-1]:
        raise MorphismError(f"leaf {i} out of range")
    if len(t.fibre_of(n, i)) < 2:
        raise MorphismError(f"leaf {i} is alone in its fibre")
    forest = _forest(t)
    kids, pos = _siblings(forest, n, i)
    del kids[pos]
    return _morphism_from(t, forest)


def merge_shuffle(t: Tree, j: int, i: int, sigma: Shuffle) -> TreeMorphism:
    """Merge level-``j`` vertices ``i, i+1``, interleaving their children by ``sigma``."""
    n = t.n
    if not 1 <= j < n:
        raise MorphismError(f"merge_shuffle needs 1 <= j < n, got j={j}")
    if not 0 <= i < t.r[j - 1] or t.parent(j, i) != t.parent(j, i + 1):
        raise MorphismError(f"vertices {i}, {i + 1} of level {j} are not in one fibre")
    a, b = len(t.children(j, i)), len(t.children(j, i + 1))
    if (sigma.a, sigma.b) != (a, b):
        raise MorphismError(f"shuffle blocks ({sigma.a},{sigma.b}) != fibre sizes ({a},{b})")
    forest = _forest(t)
    kids, pos = _siblings(forest, j, i)
    left, right = kids[pos], kids[pos + 1]
    combined = left[1] + right[1]
    merged = [None] * (a + b)
    for x, p in enumerate(sigma.perm):
        merged[p] = combined[x]
    kids[pos : pos + 2] = [[(i, i + 1), merged]]
    return _morphism_from(t, forest)


def restriction_morphism(t: Tree, leaves) -> TreeMorphism:
    """The morphism ``t -> t^I`` deleting every leaf outside ``leaves``."""
    keep = sorted(set(leaves))
    for fib in t.fibres(t.n):
        inside = [x for x in fib if x in set(keep)]
        if inside and inside[-1] - inside[0] + 1 != len(inside):
            raise MorphismError(f"leaves {inside} of fibre {list(fib)} do not form an interval")
    target = restrict(t, keep)
    alive = surviving(t, keep)
    partial = [{v: k for k, v in enumerate(level)} for level in alive]
    return _extend(t, target, partial)


def _extend(t: Tree, s: Tree, partial: list[dict[int, int]]) -> TreeMorphism:
    """Lexicographically smallest representative extending maps on survivors."""
    n = t.n
    levels = []
    for j in range(1, n + 1):
        known = partial[j - 1]
        hj = []
        for fib in t.fibres(j):
            prev = None
            for x in fib:
                if x in known:
                    v = known[x]
                elif j == n:
                    v = PLUS
                elif prev is not None:
                    v = prev
                else:
                    v = (s.fibre(j, levels[-1][t.parent(j, x)]) if j > 1 else range(s.size(1))).start
                hj.append(v)
                if v != PLUS:
                    prev = v
        levels.append(tuple(hj))
    return TreeMorphism(t, s, tuple(levels))


# -- hom-set enumeration ------------------------------------------------------


def _kept_choices(fib: range):
    """Intervals of a fibre that may survive (including the empty one)."""
    out = [()]
    for lo in fib:
        for hi in range(lo, fib.stop):
            out.append(tuple(range(lo, hi + 1)))
    return out


def _monotone_into(k: int, target: range):
    return combinations_with_replacement(target, k)


@lru_cache(maxsize=None)
def _enumerate_hom(t: Tree, s: Tree) -> tuple[TreeMorphism, ...]:
    n = t.n
    if s.n != n or any(s.r[j] > t.r[j] for j in range(n)):
        return ()
    found = {}
    for kept_parts in product(*(_kept_choices(fib) for fib in t.fibres(n))):
        kept = [x for part in kept_parts for x in part]
        if len(kept) < s.size(n):
            continue
        alive = surviving(t, kept)
        if any(len(alive[j]) < s.size(j + 1) for j in range(n)):
            continue
        for partial in _survivor_maps(t, s, alive, 1, []):
            h = _extend(t, s, partial)
            found.setdefault(canonical_key(h), h)
    return tuple(sorted(found.values(), key=lambda h: h.levels))


def _survivor_maps(t: Tree, s: Tree, alive, j: int, acc):
    """Backtrack over order-preserving, commuting, surjective maps on survivors."""
    if j > t.n:
        yield list(acc)
        return
    verts = alive[j - 1]
    groups: dict[int, list[int]] = {}
    for x in verts:
        groups.setdefault(t.parent(j, x), []).append(x)
    options = []
    for p, xs in groups.items():
        if j == 1:
            tgt = range(s.size(1))
        else:
            tgt = s.fibre(j, acc[-1][p])
        options.append([dict(zip(xs, vals)) for vals in _monotone_into(len(xs), tgt)])
    for choice in product(*options):
        m = {}
        for part in choice:
            m.update(part)
        if len(set(m.values())) != s.size(j):
            continue
        acc.append(m)
        yield from _survivor_maps(t, s, alive, j + 1, acc)
        acc.pop()


def enumerate_hom(t: Tree, s: Tree) -> list[TreeMorphism]:
    """One canonical representative per morphism ``t -> s``, sorted."""
    if t.n != s.n:
        raise MorphismError("trees have different level counts")
    return list(_enumerate_hom(t, s))


def canonical(h: TreeMorphism) -> TreeMorphism:
    """The lexicographically smallest representative of the class of ``h``."""
    alive = survivors(h)
    partial = [{x: h.level(j)[x] for x in alive[j - 1]} for j in range(1, h.n + 1)]
    return _extend(h.source, h.target, partial)


def random_representative(h: TreeMorphism, rng: random.Random) -> TreeMorphism:
    """A random valid representative of the class of ``h``."""
    t, s, n = h.source, h.target, h.n
    alive = survivors(h)
    levels = []
    for j in range(1, n + 1):
        known = {x: h.level(j)[x] for x in alive[j - 1]}
        hj = [None] * t.size(j)
        for fib in t.fibres(j):
            xs = list(fib)
            for k, x in enumerate(xs):
                if x in known:
                    hj[x] = known[x]
                    continue
                if j == n:
                    hj[x] = PLUS
                    continue
                tgt = s.fibre(j, levels[-1][t.parent(j, x)]) if j > 1 else range(s.size(1))
                lo = tgt.start
                if k > 0 and hj[xs[k - 1]] is not None:
                    lo = max(lo, hj[xs[k - 1]])
                hi = tgt.stop - 1
                nxt = [known[y] for y in xs[k + 1 :] if y in known]
                if nxt:
                    hi = min(hi, nxt[0])
                hj[x] = rng.randint(lo, hi)
        levels.append(tuple(hj))
    return TreeMorphism(t, s, tuple(levels))


def all_representatives(t: Tree, s: Tree) -> list[TreeMorphism]:
    """Every valid representative ``t -> s`` by exhaustive search (small trees only)."""
    n = t.n
    candidates = []
    for j in range(1, n + 1):
        values = list(range(s.size(j))) + ([PLUS] if j == n else [])
        candidates.append(list(product(values, repeat=t.size(j))))
    out = []
    for levels in product(*candidates):
        h = TreeMorphism(t, s, levels)
        if is_valid(h):
            out.append(h)
    return out


# -- shuffles -----------------------------------------------------------------


@lru_cache(maxsize=None)
def _shuffles(a: int, b: int) -> tuple[Shuffle, ...]:
    out = []
    for left in combinations(range(a + b), a):
        right = [p for p in range(a + b) if p not in left]
        out.append(Shuffle(a, b, tuple(left) + tuple(right)))
    return tuple(out)


def enumerate_shuffles(a: int, b: int) -> list[Shuffle]:
    if a < 0 or b < 0:
        raise MorphismError("block sizes must be nonnegative")
    return list(_shuffles(a, b))


def shuffle_sign(sigma: Shuffle, left, right) -> int:
    """Koszul sign of a shuffle of blocks whose members have the given degrees."""
    if len(left) != sigma.a or len(right) != sigma.b:
        raise MorphismError("degree lists do not match the shuffle's block sizes")
    e = sum((left[x] + 1) * (right[y] + 1) for x, y in sigma.inversions())
    return -1 if e % 2 else 1


def merge_terms(t: Tree, j: int, i: int):
    """``(sign_of_shuffle, morphism)`` for every shuffle merging ``(j, i)`` and ``(j, i+1)``."""
    left = [subtree_degree(t, j + 1, x) for x in t.children(j, i)]
    right = [subtree_degree(t, j + 1, x) for x in t.children(j, i + 1)]
    return [
        (shuffle_sign(sigma, left, right), merge_shuffle(t, j, i, sigma))
        for sigma in enumerate_shuffles(len(left), len(right))
    ]
