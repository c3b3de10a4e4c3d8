"""Coefficient systems: functors on Epi_n^+ (or its opposite) with free values.

A system gives a basis for every tree and a matrix for every morphism.
Covariant matrices map ``basis_of(source)`` to ``basis_of(target)``;
contravariant ones go the other way.
"""
from __future__ import annotations

import threading
from functools import lru_cache
from itertools import product

from .algdata import AlgebraData, BimoduleData
from .epicat import PLUS, TreeMorphism, canonical_key, compose, enumerate_hom
from .exactla import QQ, Field, SparseMatrix
from .trees import Tree

COVARIANT, CONTRAVARIANT = "covariant", "contravariant"


class CoefficientSystem:
    variance = COVARIANT
    field: Field = QQ
    name = "system"

    def basis_of(self, t: Tree) -> list:
        raise NotImplementedError

    def dim(self, t: Tree) -> int:
        return len(self.basis_of(t))

    def matrix_of(self, h: TreeMorphism) -> SparseMatrix:
        raise NotImplementedError

    def _shape(self, h: TreeMorphism) -> tuple[int, int]:
        if self.variance == COVARIANT:
            return self.dim(h.target), self.dim(h.source)
        return self.dim(h.source), self.dim(h.target)


class _TensorProducts:
    """Products of algebra basis elements and module actions, in one field."""

    def __init__(self, a: AlgebraData, m: BimoduleData, fld: Field):
        self.dA, self.dM, self.field = a.dim, m.dim, fld
        self.mul = {(i, j): self._vec(a.product(i, j)) for i in range(a.dim) for j in range(a.dim)}
        self.act = {(x, i): self._vec(m.act(x, i)) for x in range(m.dim) for i in range(a.dim)}
        self.product = lru_cache(maxsize=None)(self._product)

    def _vec(self, d):
        f = self.field
        return {k: f(c) for k, c in d.items() if f(c)}

    def _product(self, factors: tuple[int, ...]) -> dict[int, object]:
        # factors sorted and nonempty
        if len(factors) == 1:
            return {factors[0]: self.field.one}
        f = self.field
        out: dict = {}
        for k, c in self.product(factors[:-1]).items():
            for q, d in self.mul[(k, factors[-1])].items():
                out[q] = f.norm(out.get(q, 0) + c * d)
        return {k: v for k, v in out.items() if v}

    def act_by(self, b: int, factors: tuple[int, ...]) -> dict[int, object]:
        """``m_b`` times the product of ``factors``; the empty product is the unit."""
        if not factors:
            return {b: self.field.one}
        f = self.field
        out: dict = {}
        for k, c in self.product(factors).items():
            for b2, d in self.act[(b, k)].items():
                out[b2] = f.norm(out.get(b2, 0) + c * d)
        return {k: v for k, v in out.items() if v}

    def image(self, h: TreeMorphism, a: tuple[int, ...]):
        """Slot expansion ``{target tensor: coefficient}`` and the deleted factors."""
        top = h.top
        slots: list[list[int]] = [[] for _ in range(h.target.size(h.n))]
        deleted = []
        for i, v in enumerate(top):
            (deleted if v == PLUS else slots[v]).append(a[i])
        f = self.field
        expanded = {(): f.one}
        for s in slots:
            p = self.product(tuple(sorted(s)))
            if not p:
                return {}, ()
            expanded = {key + (k,): f.norm(c * d) for key, c in expanded.items() for k, d in p.items()}
        return expanded, tuple(sorted(deleted))


class Loday(CoefficientSystem):
    """``t -> M (x) A^(r_n + 1)`` with leaves multiplied into slots or into ``M``."""

    variance = COVARIANT
    name = "loday"

    def __init__(self, a: AlgebraData, m: BimoduleData, fld: Field = QQ):
        self.algebra, self.module, self.field = a, m, fld
        self._ops = _TensorProducts(a, m, fld)

    def basis_of(self, t: Tree) -> list[tuple[int, ...]]:
        return list(product(range(self.module.dim), *[range(self.algebra.dim)] * t.size(t.n)))

    def dim(self, t: Tree) -> int:
        return self.module.dim * self.algebra.dim ** t.size(t.n)

    def index(self, label: tuple[int, ...]) -> int:
        k = 0
        for x in label[1:]:
            k = k * self.algebra.dim + x
        return label[0] * self.algebra.dim ** (len(label) - 1) + k

    def matrix_of(self, h: TreeMorphism) -> SparseMatrix:
        ops, f = self._ops, self.field
        rows, cols = self._shape(h)
        entries: dict = {}
        for col, label in enumerate(self.basis_of(h.source)):
            b, a = label[0], label[1:]
            slots, deleted = ops.image(h, a)
            if not slots:
                continue
            for b2, c in ops.act_by(b, deleted).items():
                for tensor, d in slots.items():
                    key = (self.index((b2,) + tensor), col)
                    entries[key] = f.norm(entries.get(key, 0) + c * d)
        return SparseMatrix._raw(rows, cols, f, {k: v for k, v in entries.items() if v})


class DualLoday(CoefficientSystem):
    """``t -> Hom(A^(r_n + 1), M)``, precomposing with products and acting on values."""

    variance = CONTRAVARIANT
    name = "dual_loday"

    def __init__(self, a: AlgebraData, m: BimoduleData, fld: Field = QQ):
        self.algebra, self.module, self.field = a, m, fld
        self._ops = _TensorProducts(a, m, fld)

    def basis_of(self, t: Tree) -> list[tuple[int, ...]]:
        return [a + (b,) for a in product(range(self.algebra.dim), repeat=t.size(t.n)) for b in range(self.module.dim)]

    def dim(self, t: Tree) -> int:
        return self.module.dim * self.algebra.dim ** t.size(t.n)

    def index(self, label: tuple[int, ...]) -> int:
        k = 0
        for x in label[:-1]:
            k = k * self.algebra.dim + x
        return k * self.module.dim + label[-1]

    def matrix_of(self, h: TreeMorphism) -> SparseMatrix:
        ops, f = self._ops, self.field
        rows, cols = self._shape(h)
        entries: dict = {}
        for a in product(range(self.algebra.dim), repeat=h.source.size(h.n)):
            slots, deleted = ops.image(h, a)
            if not slots:
                continue
            for b in range(self.module.dim):
                for b2, c in ops.act_by(b, deleted).items():
                    row = self.index(a + (b2,))
                    for tensor, d in slots.items():
                        key = (row, self.index(tensor + (b,)))
                        entries[key] = f.norm(entries.get(key, 0) + c * d)
        return SparseMatrix._raw(rows, cols, f, {k: v for k, v in entries.items() if v})


class Representable(CoefficientSystem):
    """``P_t``: the free module on morphisms out of ``t``, acting by postcomposition."""

    variance = COVARIANT
    name = "representable"

    def __init__(self, t: Tree, fld: Field = QQ):
        self.tree, self.field = t, fld
        self._lock = threading.Lock()
        self._bases: dict[Tree, tuple[list[TreeMorphism], dict]] = {}

    def _hom(self, s: Tree):
        entry = self._bases.get(s)
        if entry is None:
            homs = enumerate_hom(self.tree, s)
            entry = (homs, {canonical_key(h): k for k, h in enumerate(homs)})
            with self._lock:
                entry = self._bases.setdefault(s, entry)
        return entry

    def basis_of(self, s: Tree) -> list[TreeMorphism]:
        return self._hom(s)[0]

    def matrix_of(self, g: TreeMorphism) -> SparseMatrix:
        rows, cols = self._shape(g)
        index = self._hom(g.target)[1]
        entries = {}
        for col, h in enumerate(self.basis_of(g.source)):
            entries[(index[canonical_key(compose(h, g))], col)] = self.field.one
        return SparseMatrix._raw(rows, cols, self.field, entries)


class Leaves(CoefficientSystem):
    """The leaves functor: ``k<[r_n]>`` with ``alpha_m -> alpha_{h_n(m)}``, or 0 if deleted."""

    variance = COVARIANT
    name = "leaves"

    def __init__(self, n: int, fld: Field = QQ):
        self.n, self.field = n, fld

    def basis_of(self, t: Tree) -> list[int]:
        return list(range(t.size(t.n)))

    def matrix_of(self, h: TreeMorphism) -> SparseMatrix:
        rows, cols = self._shape(h)
        one = self.field.one
        return SparseMatrix._raw(rows, cols, self.field, {(v, m): one for m, v in enumerate(h.top) if v != PLUS})


class Dual(CoefficientSystem):
    """``F^*(t) = Hom(F(t), k)`` in the dual basis: variance flipped, matrices transposed."""

    def __init__(self, inner: CoefficientSystem):
        self.inner, self.field = inner, inner.field
        self.variance = CONTRAVARIANT if inner.variance == COVARIANT else COVARIANT
        self.name = f"dual({inner.name})"

    def basis_of(self, t: Tree) -> list:
        return self.inner.basis_of(t)

    def dim(self, t: Tree) -> int:
        return self.inner.dim(t)

    def matrix_of(self, h: TreeMorphism) -> SparseMatrix:
        return self.inner.matrix_of(h).T


class ExtendTrivial(CoefficientSystem):
    """Extension of a functor on Epi_n by zero on every morphism deleting a leaf."""

    def __init__(self, inner: CoefficientSystem):
        self.inner, self.field, self.variance = inner, inner.field, inner.variance
        self.name = f"extend_trivial({inner.name})"

    def basis_of(self, t: Tree) -> list:
        return self.inner.basis_of(t)

    def dim(self, t: Tree) -> int:
        return self.inner.dim(t)

    def matrix_of(self, h: TreeMorphism) -> SparseMatrix:
        if h.hits_plus:
            rows, cols = self._shape(h)
            return SparseMatrix.zeros(rows, cols, self.field)
        return self.inner.matrix_of(h)


def loday(a: AlgebraData, m: BimoduleData, fld: Field = QQ) -> Loday:
    return Loday(a, m, fld)


def dual_loday(a: AlgebraData, m: BimoduleData, fld: Field = QQ) -> DualLoday:
    return DualLoday(a, m, fld)


def representable(t: Tree, fld: Field = QQ) -> Representable:
    return Representable(t, fld)


def leaves_functor(n: int, fld: Field = QQ) -> Leaves:
    return Leaves(n, fld)


def dual(F: CoefficientSystem) -> CoefficientSystem:
    return F.inner if isinstance(F, Dual) else Dual(F)


def extend_trivial(F: CoefficientSystem) -> ExtendTrivial:
    return ExtendTrivial(F)
