"""The E_n chain multicomplex of a functor and the cochain complex of a cofunctor.

Degree ``m`` is spanned by ``F(t)`` for all trees of homological degree
``m``.  The ``n`` differentials are assembled separately per part:

* ``(j, "merge")`` for ``j < n``: merge adjacent siblings on level ``j``,
  interleaving their children by every shuffle;
* ``(n, "merge")``: merge adjacent leaves in one top fibre;
* ``(n, "dmin")`` / ``(n, "dmax")``: delete the extremal leaf of a top
  fibre with at least two leaves.

The total differential is the plain sum of all parts.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .coeffsys import COVARIANT, CoefficientSystem
from .epicat import delete_leaf, merge_terms, top_merge
from .exactla import Field, NotAComplexError, SparseMatrix, homology_rank, rank
from .trees import Tree, corolla, enumerate_by_degree, linear_tree, sign_exponent

CHAIN, COCHAIN = "chain", "cochain"
MERGE, DMIN, DMAX = "merge", "dmin", "dmax"


@lru_cache(maxsize=None)
def differential_terms(t: Tree) -> tuple:
    """``(level, part, sign, morphism)`` for every summand leaving ``t``."""
    n = t.n
    out = []
    for j in range(1, n):
        for fib in t.fibres(j):
            for i in list(fib)[:-1]:
                base = -1 if sign_exponent(t, j, i) % 2 else 1
                out.extend((j, MERGE, base * eps, h) for eps, h in merge_terms(t, j, i))
    for fib in t.fibres(n):
        leaves = list(fib)
        for i in leaves[:-1]:
            out.append((n, MERGE, -1 if sign_exponent(t, n, i) % 2 else 1, top_merge(t, i)))
        if len(leaves) > 1:
            x, y = leaves[0], leaves[-1]
            out.append((n, DMIN, -1 if (sign_exponent(t, n, x) - 1) % 2 else 1, delete_leaf(t, x)))
            out.append((n, DMAX, -1 if sign_exponent(t, n, y) % 2 else 1, delete_leaf(t, y)))
    return tuple(out)


@dataclass
class GradedComplex:
    """Bases per degree plus differential matrices, total and per part.

    Chain: ``diff[m]`` maps degree ``m`` to ``m - 1`` (``1 <= m <= D``).
    Cochain: ``diff[m]`` maps degree ``m`` to ``m + 1`` (``0 <= m < D``).
    """

    direction: str
    field: Field
    n: int
    max_degree: int
    bases: dict[int, list] = field(default_factory=dict)
    diff: dict[int, SparseMatrix] = field(default_factory=dict)
    parts: dict[tuple[int, str], dict[int, SparseMatrix]] = field(default_factory=dict)

    def dim(self, m: int) -> int:
        return len(self.bases.get(m, ()))

    def _zero(self, rows: int, cols: int) -> SparseMatrix:
        return SparseMatrix.zeros(rows, cols, self.field)

    def out_of(self, m: int) -> SparseMatrix:
        """The differential leaving degree ``m`` (zero past the edges)."""
        if self.direction == CHAIN:
            return self.diff[m] if m in self.diff else self._zero(self.dim(m - 1), self.dim(m))
        return self.diff[m] if m in self.diff else self._zero(self.dim(m + 1), self.dim(m))

    def into(self, m: int) -> SparseMatrix:
        return self.out_of(m + 1 if self.direction == CHAIN else m - 1)

    def level(self, j: int, m: int) -> SparseMatrix:
        """``partial_j`` leaving degree ``m``."""
        mats = [p[m] for (jj, _), p in self.parts.items() if jj == j and m in p]
        total = self.out_of(m).scale(0)
        for a in mats:
            total = total + a
        return total

    def part(self, j: int, name: str, m: int) -> SparseMatrix:
        p = self.parts.get((j, name), {})
        return p[m] if m in p else self.out_of(m).scale(0)

    def degrees(self) -> range:
        return range(self.max_degree)


def _assemble(F: CoefficientSystem, D: int, direction: str, n: int | None) -> GradedComplex:
    if F.variance != (COVARIANT if direction == CHAIN else "contravariant"):
        raise ValueError(f"{direction} complex needs a {'covariant' if direction == CHAIN else 'contravariant'} system")
    n = n or _guess_n(F)
    fld = F.field
    trees = {m: enumerate_by_degree(n, m) for m in range(D + 1)}
    offsets: dict[int, dict[Tree, int]] = {}
    C = GradedComplex(direction, fld, n, D)
    for m in range(D + 1):
        off, basis = {}, []
        for t in trees[m]:
            off[t] = len(basis)
            basis.extend((t, label) for label in F.basis_of(t))
        offsets[m], C.bases[m] = off, basis
    keys = [(j, MERGE) for j in range(1, n + 1)] + [(n, DMIN), (n, DMAX)]
    C.parts = {k: {} for k in keys}
    for m in range(1, D + 1):
        acc = {k: {} for k in keys}
        for t in trees[m]:
            col0 = offsets[m][t]
            for j, name, sign, h in differential_terms(t):
                row0 = offsets[m - 1][h.target]
                block = acc[(j, name)]
                for (r, c), v in F.matrix_of(h).items():
                    key = (row0 + r, col0 + c) if direction == CHAIN else (col0 + r, row0 + c)
                    block[key] = fld.norm(block.get(key, 0) + sign * v)
        lo, hi = C.dim(m - 1), C.dim(m)
        shape, slot = ((lo, hi), m) if direction == CHAIN else ((hi, lo), m - 1)
        total: dict = {}
        for k in keys:
            entries = {e: v for e, v in acc[k].items() if v}
            C.parts[k][slot] = SparseMatrix._raw(*shape, fld, entries)
            for e, v in entries.items():
                total[e] = fld.norm(total.get(e, 0) + v)
        C.diff[slot] = SparseMatrix._raw(*shape, fld, {e: v for e, v in total.items() if v})
    return C


def _guess_n(F) -> int:
    if getattr(F, "n", None):
        return F.n
    inner = getattr(F, "inner", None)
    if inner is not None:
        return _guess_n(inner)
    tree = getattr(F, "tree", None)
    if tree is not None:
        return tree.n
    raise ValueError(f"cannot infer the number of levels for {F.name}; pass n explicitly")


def build_chain(F: CoefficientSystem, D: int, n: int | None = None) -> GradedComplex:
    """Total chain complex of ``F`` assembled through degree ``D``."""
    return _assemble(F, D, CHAIN, n)


def build_cochain(G: CoefficientSystem, D: int, n: int | None = None) -> GradedComplex:
    """Total cochain complex of ``G`` assembled through degree ``D``."""
    return _assemble(G, D, COCHAIN, n)


def homology_table(C: GradedComplex) -> dict[int, int]:
    """Betti numbers in degrees ``0 .. D-1``; raises NotAComplexError."""
    return {m: homology_rank(C.into(m), C.out_of(m)) for m in C.degrees()}


def _label(C: GradedComplex, m: int, k: int):
    t, lab = C.bases[m][k]
    return {"tree": t.to_json(), "label": lab if not hasattr(lab, "to_json") else lab.to_json()}


@dataclass
class Diagnostic:
    identity: str
    degree: int
    ok: bool
    witness: dict | None = None

    def to_json(self) -> dict:
        return {"identity": self.identity, "degree": self.degree, "ok": self.ok, "witness": self.witness}


def _check(C: GradedComplex, name: str, m: int, product: SparseMatrix, out: list):
    hit = product.first_nonzero()
    if hit is None:
        out.append(Diagnostic(name, m, True))
        return
    r, c, v = hit
    step = -2 if C.direction == CHAIN else 2
    out.append(Diagnostic(name, m, False, {"value": str(v), "from": _label(C, m, c), "to": _label(C, m + step, r)}))


def check_complex(C: GradedComplex) -> list[Diagnostic]:
    """``D o D = 0`` on every assembled pair of consecutive differentials."""
    out: list[Diagnostic] = []
    for m in _composable(C):
        first = C.out_of(m)
        second = C.out_of(m - 1 if C.direction == CHAIN else m + 1)
        _check(C, "d^2", m, second @ first, out)
    return out


def _composable(C: GradedComplex) -> range:
    return range(2, C.max_degree + 1) if C.direction == CHAIN else range(0, C.max_degree - 1)


def check_multicomplex(C: GradedComplex) -> list[Diagnostic]:
    """Every multicomplex identity at every assembled degree, with witnesses."""
    n = C.n
    out: list[Diagnostic] = []
    nxt = (lambda m: m - 1) if C.direction == CHAIN else (lambda m: m + 1)
    for m in _composable(C):
        lv = {j: (C.level(j, m), C.level(j, nxt(m))) for j in range(1, n + 1)}
        for j in range(1, n + 1):
            a, b = lv[j]
            _check(C, f"d{j}^2", m, b @ a, out)
            for i in range(j + 1, n + 1):
                c, d = lv[i]
                _check(C, f"d{i}d{j}+d{j}d{i}", m, d @ a + b @ c, out)
        # split the top differential into its merge part and the two deletions
        tm, tm2 = C.part(n, MERGE, m), C.part(n, MERGE, nxt(m))
        dl = C.part(n, DMIN, m) + C.part(n, DMAX, m)
        dl2 = C.part(n, DMIN, nxt(m)) + C.part(n, DMAX, nxt(m))
        _check(C, f"dt{n}^2", m, tm2 @ tm, out)
        _check(C, "delta^2+delta*dt_n+dt_n*delta", m, dl2 @ dl + tm2 @ dl + dl2 @ tm, out)
        for j in range(1, n):
            a, b = lv[j]
            _check(C, f"delta*d{j}+d{j}*delta", m, dl2 @ a + b @ dl, out)
            _check(C, f"dt{n}*d{j}+d{j}*dt{n}", m, tm2 @ a + b @ tm, out)
    return out


def h_zero(F: CoefficientSystem, n: int | None = None) -> tuple[int, SparseMatrix]:
    """Rank of the cokernel of the signed three-term map out of the two-leaf tree.

    The map is ``(-1)^(n-1) F(delta_0) + (-1)^n F(d_0) + (-1)^(n+1) F(delta_1)``
    from the two-leaf corolla to the linear tree.  For a contravariant
    system the transpose (a kernel computation) is used.
    """
    n = n or _guess_n(F)
    src, tgt = corolla(n, 2), linear_tree(n)
    sgn = 1 if n % 2 else -1
    terms = [(sgn, delete_leaf(src, 0)), (-sgn, top_merge(src, 0)), (sgn, delete_leaf(src, 1))]
    mats = [F.matrix_of(h).scale(c) for c, h in terms]
    total = mats[0] + mats[1] + mats[2]
    return F.dim(tgt) - rank(total), total


__all__ = [
    "CHAIN",
    "COCHAIN",
    "Diagnostic",
    "GradedComplex",
    "NotAComplexError",
    "build_chain",
    "build_cochain",
    "check_complex",
    "check_multicomplex",
    "differential_terms",
    "h_zero",
    "homology_table",
]
