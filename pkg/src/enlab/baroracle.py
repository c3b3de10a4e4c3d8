"""Independent cross-check: the iterated bar construction with its twist.

Words of ``B^L(A)`` are nested tuples.  A level-1 word is a nonempty tuple
of algebra basis indices; a level-``L`` word is a nonempty tuple of
level-``(L-1)`` words.  Every letter carries one suspension, so the degree
of a word is the sum of ``|letter| + 1`` and algebra letters have degree 0.

Signs follow the Koszul rule from these degrees.  Nothing here reads tree
labels or shuffle signs from the tree-category code; the only shared piece
is exact linear algebra.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

from .algdata import AlgebraData, BimoduleData, regular_module, unitalize
from .exactla import QQ, Field, SparseMatrix, homology_rank

CHAIN, COCHAIN = "chain", "cochain"


class OracleError(ValueError):
    pass


def degree(word) -> int:
    """Internal degree: total number of suspensions."""
    if isinstance(word, int):
        return 0
    return sum(degree(x) + 1 for x in word)


def depth(word) -> int:
    return 0 if isinstance(word, int) else 1 + depth(word[0])


def _add(acc: dict, key, c, fld: Field):
    v = fld.norm(acc.get(key, 0) + c)
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


# -- words ---------------------------------------------------------------------


@lru_cache(maxsize=None)
def words(level: int, deg: int, dim_a: int) -> tuple:
    """All level-``level`` words of internal degree ``deg`` over ``dim_a`` letters."""
    if level == 0:
        return tuple(range(dim_a)) if deg == 0 else ()
    out = []
    # first letter of internal degree e costs e + 1 suspensions
    for e in range(level - 1, deg):
        for first in words(level - 1, e, dim_a):
            rest = deg - e - 1
            if rest == 0:
                out.append((first,))
            else:
                out.extend((first,) + tail for tail in words(level, rest, dim_a))
    return tuple(out)


def words_in_degree(n: int, m: int, dim_a: int) -> tuple:
    """Words of ``B^n(A)`` of homological degree ``m`` (internal degree ``m + n``)."""
    return words(n, m + n, dim_a)


# -- products ------------------------------------------------------------------


def shuffle_product(u: tuple, v: tuple, fld: Field = QQ) -> dict:
    """Signed shuffle product of two words of one level.

    Built letter by letter: either the first letter of ``u`` leads, or the
    first letter of ``v`` is moved in front of all of ``u`` at the cost of
    the product of their degrees.
    """
    if not u or not v:
        raise OracleError("the bar construction is reduced: empty words are not allowed")
    return dict(_shuffle(tuple(u), tuple(v), fld))


@lru_cache(maxsize=None)
def _shuffle(u, v, fld):
    if not u:
        return ((v, fld.one),)
    if not v:
        return ((u, fld.one),)
    acc: dict = {}
    for w, c in _shuffle(u[1:], v, fld):
        _add(acc, (u[0],) + w, c, fld)
    du = degree(u)
    s = -1 if (degree(v[0]) + 1) * du % 2 else 1
    for w, c in _shuffle(u, v[1:], fld):
        _add(acc, (v[0],) + w, fld.norm(s * c), fld)
    return tuple(sorted(acc.items()))


def _letter_product(a: AlgebraData, x, y, fld: Field) -> dict:
    if isinstance(x, int):
        return {k: fld(c) for k, c in a.product(x, y).items() if fld(c)}
    return shuffle_product(x, y, fld)


class BarDifferential:
    """Memoized bar differential for one algebra and field."""

    def __init__(self, a: AlgebraData, fld: Field = QQ):
        self.algebra, self.field = a, fld
        self._memo: dict = {}

    def __call__(self, word: tuple) -> tuple:
        hit = self._memo.get(word)
        if hit is None:
            hit = self._memo[word] = self._compute(word)
        return hit

    def _compute(self, word) -> tuple:
        a, fld = self.algebra, self.field
        acc: dict = {}
        before = 0
        for k, x in enumerate(word):
            if not isinstance(x, int):
                # d(s x) = -s(d x), after passing ``before`` suspensions
                sgn = -1 if (before + 1) % 2 else 1
                for y, c in self(x):
                    _add(acc, word[:k] + (y,) + word[k + 1 :], sgn * c, fld)
            before += degree(x) + 1
        before = 0
        for i in range(len(word) - 1):
            x, y = word[i], word[i + 1]
            sgn = -1 if (before + degree(x) + 1) % 2 else 1
            for z, c in _letter_product(a, x, y, fld).items():
                _add(acc, word[:i] + (z,) + word[i + 2 :], sgn * c, fld)
            before += degree(x) + 1
        return tuple(acc.items())


def bar_differential(a: AlgebraData, word: tuple, fld: Field = QQ) -> dict:
    """Full differential of a word of any level: inner part plus products."""
    return dict(BarDifferential(a, fld)(word))


def displayed_bar_differential(a: AlgebraData, word: tuple, fld: Field = QQ) -> dict:
    """``sum_i (-1)^(i-1) [c_1|...|c_i c_(i+1)|...|c_l]`` for a level-1 word.

    This alternating sum is the negative of :func:`bar_differential` on
    level-1 words; the two conventions give isomorphic complexes.
    """
    if depth(word) != 1:
        raise OracleError("the displayed formula is for level-1 words")
    acc: dict = {}
    for i in range(len(word) - 1):
        sgn = 1 if i % 2 == 0 else -1
        for z, c in a.product(word[i], word[i + 1]).items():
            _add(acc, word[:i] + (z,) + word[i + 2 :], sgn * fld(c), fld)
    return acc


# -- the twist -----------------------------------------------------------------


def _innermost(word, level: int, before: int, path=()):
    """Yield ``(path, inner_word, suspensions_before_first_letter)`` for level-1 subwords."""
    if level == 1:
        yield path, word, before
        return
    for k, x in enumerate(word):
        yield from _innermost(x, level - 1, before + 1, path + (k,))
        before += degree(x) + 1


def _replace(word, path, new):
    if not path:
        return new
    k = path[0]
    return word[:k] + (_replace(word[k], path[1:], new),) + word[k + 1 :]


def twist_terms(word: tuple, n: int) -> list[tuple[int, int, tuple]]:
    """``(sign, letter, word')`` for every extremal letter removal.

    The first letter of an innermost word of length at least two is pulled
    to the coefficient with sign ``(-1)^(suspensions before it)``; the last
    letter with the opposite of that sign.
    """
    out = []
    for path, inner, before in _innermost(word, n, 0):
        if len(inner) < 2:
            continue
        out.append((-1 if before % 2 else 1, inner[0], _replace(word, path, inner[1:])))
        last_before = before + len(inner) - 1
        out.append((1 if last_before % 2 else -1, inner[-1], _replace(word, path, inner[:-1])))
    return out


# -- complexes -----------------------------------------------------------------


@dataclass
class TwistedComplex:
    """Oracle complex on ``M (x) B^n(A)``; same accessors as the tree complex."""

    direction: str
    field: Field
    n: int
    max_degree: int
    bases: dict[int, list] = field(default_factory=dict)
    diff: dict[int, SparseMatrix] = field(default_factory=dict)
    bar_part: dict[int, SparseMatrix] = field(default_factory=dict)
    twist_part: dict[int, SparseMatrix] = field(default_factory=dict)

    def dim(self, m: int) -> int:
        return len(self.bases.get(m, ()))

    def out_of(self, m: int) -> SparseMatrix:
        if m in self.diff:
            return self.diff[m]
        other = m - 1 if self.direction == CHAIN else m + 1
        return SparseMatrix.zeros(self.dim(other), self.dim(m), self.field)

    def into(self, m: int) -> SparseMatrix:
        return self.out_of(m + 1 if self.direction == CHAIN else m - 1)

    def degrees(self) -> range:
        return range(self.max_degree)

    def betti(self) -> dict[int, int]:
        return {m: homology_rank(self.into(m), self.out_of(m)) for m in self.degrees()}


def _chain_terms(bar: BarDifferential, m: BimoduleData, n: int, b: int, word, fld: Field):
    """``(part, b', word', coefficient)`` of the differential of ``m_b (x) word``."""
    for w, c in bar(word):
        yield "bar", b, w, c
    for sgn, letter, w in twist_terms(word, n):
        for b2, c in m.act(b, letter).items():
            c = fld(c)
            if c:
                yield "twist", b2, w, fld.norm(sgn * c)


def coefficient_complexes(
    a: AlgebraData, m: BimoduleData, n: int, D: int, fld: Field = QQ
) -> tuple[TwistedComplex, TwistedComplex]:
    """Chain complex ``M (x) B^n(A)`` and cochain complex ``Hom(B^n(A), M)`` with twist.

    Chain basis in degree ``k``: ``(b, word)``; cochain basis: ``(word, b)``
    meaning the map sending ``word`` to ``m_b`` and every other word to 0.
    """
    chain = TwistedComplex(CHAIN, fld, n, D)
    cochain = TwistedComplex(COCHAIN, fld, n, D)
    index: dict[int, dict] = {}
    for k in range(D + 1):
        ws = words_in_degree(n, k, a.dim)
        chain.bases[k] = [(b, w) for w in ws for b in range(m.dim)]
        cochain.bases[k] = [(w, b) for w in ws for b in range(m.dim)]
        index[k] = {w: i for i, w in enumerate(ws)}
    dM = m.dim
    bar = BarDifferential(a, fld)
    for k in range(1, D + 1):
        parts = {"bar": {}, "twist": {}}
        coparts = {"bar": {}, "twist": {}}
        for col, (b, w) in enumerate(chain.bases[k]):
            src = index[k][w]
            for part, b2, w2, c in _chain_terms(bar, m, n, b, w, fld):
                tgt = index[k - 1][w2]
                _add(parts[part], (tgt * dM + b2, col), c, fld)
                # (df)(w) picks up c * (letter acting on f(w2))
                _add(coparts[part], (src * dM + b2, tgt * dM + b), c, fld)
        lo, hi = chain.dim(k - 1), chain.dim(k)
        chain.bar_part[k] = SparseMatrix._raw(lo, hi, fld, parts["bar"])
        chain.twist_part[k] = SparseMatrix._raw(lo, hi, fld, parts["twist"])
        chain.diff[k] = chain.bar_part[k] + chain.twist_part[k]
        cochain.bar_part[k - 1] = SparseMatrix._raw(hi, lo, fld, coparts["bar"])
        cochain.twist_part[k - 1] = SparseMatrix._raw(hi, lo, fld, coparts["twist"])
        cochain.diff[k - 1] = cochain.bar_part[k - 1] + cochain.twist_part[k - 1]
    return chain, cochain


def iterated_bar(a: AlgebraData, n: int, D: int, fld: Field = QQ) -> TwistedComplex:
    """``B^n(A)`` alone (trivial one-dimensional coefficients, no twist survives)."""
    trivial = BimoduleData(("1",), {})
    chain, _ = coefficient_complexes(a, trivial, n, D, fld)
    chain.bases = {k: [w for _, w in basis] for k, basis in chain.bases.items()}
    return chain


def twist(a: AlgebraData, n: int, D: int, fld: Field = QQ) -> TwistedComplex:
    """``A_+ (x) B^n(A)`` with the bar differential plus the twist."""
    plus = unitalize(a).algebra
    chain, _ = coefficient_complexes(a, regular_module(plus), n, D, fld)
    return chain


# -- the Hochschild complex ------------------------------------------------------


def hochschild(a: AlgebraData, m: BimoduleData, D: int, fld: Field = QQ) -> TwistedComplex:
    """``M (x) A^(l+1)`` in degree ``l`` with the standard differential.

    ``m (x) a_0 ... a_l -> m a_0 (x) a_1 ... + (-1)^(l+1) a_l m (x) a_0 ... a_(l-1)
    + sum_i (-1)^(i+1) m (x) ... a_i a_(i+1) ...``
    """
    C = TwistedComplex(CHAIN, fld, 1, D)
    index = {}
    for l in range(D + 1):
        tensors = list(product(range(a.dim), repeat=l + 1))
        C.bases[l] = [(b, t) for t in tensors for b in range(m.dim)]
        index[l] = {key: i for i, key in enumerate(C.bases[l])}
    for l in range(1, D + 1):
        bar, tw = {}, {}
        for col, (b, t) in enumerate(C.bases[l]):
            for b2, c in m.act(b, t[0]).items():
                _add(tw, (index[l - 1][(b2, t[1:])], col), fld(c), fld)
            s = 1 if l % 2 else -1
            for b2, c in m.act(b, t[-1]).items():
                _add(tw, (index[l - 1][(b2, t[:-1])], col), s * fld(c), fld)
            for i in range(l):
                s = -1 if i % 2 == 0 else 1
                for z, c in a.product(t[i], t[i + 1]).items():
                    _add(bar, (index[l - 1][(b, t[:i] + (z,) + t[i + 2 :])], col), s * fld(c), fld)
        lo, hi = C.dim(l - 1), C.dim(l)
        C.bar_part[l] = SparseMatrix._raw(lo, hi, fld, bar)
        C.twist_part[l] = SparseMatrix._raw(lo, hi, fld, tw)
        C.diff[l] = C.bar_part[l] + C.twist_part[l]
    return C


# -- comparison with the tree complex --------------------------------------------


def flatten(word, n: int):
    """``(r, maps, leaf_letters)`` of the tree a nested word describes."""
    layer = list(word)
    sizes, maps = [len(layer) - 1], []
    for _ in range(n - 1):
        f, nxt = [], []
        for p, x in enumerate(layer):
            f.extend([p] * len(x))
            nxt.extend(x)
        maps.append(tuple(f))
        sizes.append(len(nxt) - 1)
        layer = nxt
    return tuple(sizes), tuple(maps), tuple(layer)


@dataclass
class Comparison:
    ok: bool
    degrees: dict[int, bool] = field(default_factory=dict)
    mismatch: dict | None = None
    betti_tree: dict | None = None
    betti_oracle: dict | None = None

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "degrees": {str(k): v for k, v in self.degrees.items()},
            "mismatch": self.mismatch,
            "bettiTree": {str(k): v for k, v in (self.betti_tree or {}).items()},
            "bettiOracle": {str(k): v for k, v in (self.betti_oracle or {}).items()},
        }


def _tree_key(t, label):
    return (t.r, t.maps, tuple(label))


def _oracle_key(n, b, w):
    r, maps, leaves = flatten(w, n)
    return (r, maps, (b,) + leaves)


def compare_with_tree_complex(
    a: AlgebraData,
    m: BimoduleData,
    n: int,
    D: int,
    fld: Field = QQ,
    tree_complex=None,
    oracle_complex=None,
    betti: bool = True,
) -> Comparison:
    """Entrywise comparison of the Loday tree complex with the twisted bar complex."""
    from .coeffsys import loday
    from .encomplex import build_chain, differential_terms

    T = tree_complex or build_chain(loday(a, m, fld), D, n=n)
    O = oracle_complex or coefficient_complexes(a, m, n, D, fld)[0]
    result = Comparison(True)
    perm = {}
    for k in range(D + 1):
        pos = {_tree_key(t, lab): i for i, (t, lab) in enumerate(T.bases[k])}
        okeys = [_oracle_key(n, b, w) for b, w in O.bases[k]]
        if len(okeys) != len(pos) or any(key not in pos for key in okeys):
            result.ok = False
            result.mismatch = {"degree": k, "reason": "bases are not in bijection"}
            return result
        perm[k] = [pos[key] for key in okeys]
    for k in range(1, D + 1):
        moved = O.diff[k].permuted(perm[k - 1], perm[k])
        same = moved == T.diff[k]
        result.degrees[k] = same
        if same or result.mismatch:
            result.ok = result.ok and same
            continue
        result.ok = False
        diff = moved - T.diff[k]
        r, c, _ = diff.first_nonzero()
        t, lab = T.bases[k][c]
        t2, lab2 = T.bases[k - 1][r]
        inv = {v: i for i, v in enumerate(perm[k])}
        b, w = O.bases[k][inv[c]]
        terms = [
            {"level": j, "part": part, "sign": sign, "morphism": repr(h)}
            for j, part, sign, h in differential_terms(t)
            if h.target == t2
        ]
        result.mismatch = {
            "degree": k,
            "source": {"tree": t.to_json(), "label": list(lab), "word": repr(w), "module": b},
            "target": {"tree": t2.to_json(), "label": list(lab2)},
            "tree_entry": str(T.diff[k][(r, c)]),
            "oracle_entry": str(moved[(r, c)]),
            "tree_terms": terms,
        }
    if betti:
        from .encomplex import homology_table

        result.betti_tree = homology_table(T)
        result.betti_oracle = O.betti()
        result.ok = result.ok and result.betti_tree == result.betti_oracle
    return result
