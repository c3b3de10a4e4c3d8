"""Exact linear algebra over the rationals and prime fields.

Rank over F_p runs through a dense row-reduction kernel.  A compiled
(Cython) kernel is used when it was built; otherwise, or when the
environment variable ``ENLAB_PURE_PYTHON`` is set, a numpy implementation
is selected at import.  Rank over Q uses sparse fraction-free elimination
with Markowitz-style pivoting.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from . import _rank_py

if os.environ.get("ENLAB_PURE_PYTHON"):
    _kernel, BACKEND = _rank_py.rank_mod_p_dense, "python"
else:
    try:
        from ._rank_ext import rank_mod_p_dense as _kernel

        BACKEND = "compiled"
    except ImportError:  # pragma: no cover - depends on the build
        _kernel, BACKEND = _rank_py.rank_mod_p_dense, "python"


class FieldError(ValueError):
    pass


class NotAComplexError(ArithmeticError):
    """A composite of consecutive differentials is nonzero."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    k = 2
    while k * k <= p:
        if p % k == 0:
            return False
        k += 1
    return True


@dataclass(frozen=True)
class Field:
    """Q when ``p == 0``, otherwise F_p."""

    p: int = 0

    def __post_init__(self):
        if self.p and (not _is_prime(self.p) or self.p >= 2**31):
            raise FieldError(f"{self.p} is not a prime below 2^31")

    @property
    def is_rational(self) -> bool:
        return self.p == 0

    def __call__(self, x):
        """Coerce an int, Fraction or ``"num/den"`` string into the field."""
        if isinstance(x, str):
            x = Fraction(x)
        if self.p == 0:
            return Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise FieldError(f"{x} has no image in F_{self.p}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def norm(self, x):
        return x % self.p if self.p else x

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def to_json(self) -> dict:
        return {"kind": "rational"} if self.p == 0 else {"kind": "prime", "p": self.p}

    def __str__(self) -> str:
        return "Q" if self.p == 0 else f"F:{self.p}"


QQ = Field(0)


def parse_field(value) -> Field:
    """Accepts ``"Q"``, ``"F:p"`` or the JSON forms ``{"kind": ...}``."""
    if isinstance(value, Field):
        return value
    if isinstance(value, dict):
        if value.get("kind") == "rational":
            return QQ
        if value.get("kind") == "prime":
            return Field(int(value["p"]))
        raise FieldError(f"unknown field {value!r}")
    s = str(value).strip()
    if s.upper() in ("Q", "QQ"):
        return QQ
    if s.upper().startswith("F:"):
        try:
            return Field(int(s[2:]))
        except ValueError as exc:
            raise FieldError(f"bad field {value!r}") from exc
    raise FieldError(f"unknown field {value!r}")


class SparseMatrix:
    """Immutable sparse matrix; ``entries`` maps ``(row, col)`` to nonzero values."""

    __slots__ = ("nrows", "ncols", "field", "_entries")

    def __init__(self, nrows: int, ncols: int, field: Field, entries=None):
        self.nrows, self.ncols, self.field = nrows, ncols, field
        clean = {}
        for (i, j), v in (entries or {}).items():
            if not (0 <= i < nrows and 0 <= j < ncols):
                raise IndexError(f"entry ({i}, {j}) outside {nrows}x{ncols}")
            v = field(v)
            if v:
                clean[(i, j)] = v
        self._entries = clean

    @classmethod
    def _raw(cls, nrows, ncols, field, entries):
        m = cls.__new__(cls)
        m.nrows, m.ncols, m.field, m._entries = nrows, ncols, field, entries
        return m

    @classmethod
    def from_triples(cls, nrows, ncols, field, triples):
        acc: dict = {}
        for i, j, v in triples:
            acc[(i, j)] = acc.get((i, j), 0) + field(v)
        return cls._raw(nrows, ncols, field, {k: field.norm(v) for k, v in acc.items() if field.norm(v)})

    @classmethod
    def zeros(cls, nrows, ncols, field):
        return cls._raw(nrows, ncols, field, {})

    @classmethod
    def identity(cls, size, field):
        return cls._raw(size, size, field, {(i, i): field.one for i in range(size)})

    @classmethod
    def from_dense(cls, rows, field):
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        return cls(len(rows), ncols, field, {(i, j): v for i, r in enumerate(rows) for j, v in enumerate(r) if v})

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def entries(self) -> dict:
        return dict(self._entries)

    def items(self):
        return self._entries.items()

    def nnz(self) -> int:
        return len(self._entries)

    def __getitem__(self, key):
        return self._entries.get(key, self.field.zero)

    def to_dense(self) -> list[list]:
        out = [[self.field.zero] * self.ncols for _ in range(self.nrows)]
        for (i, j), v in self._entries.items():
            out[i][j] = v
        return out

    @property
    def T(self) -> SparseMatrix:
        return SparseMatrix._raw(self.ncols, self.nrows, self.field, {(j, i): v for (i, j), v in self._entries.items()})

    def rows(self) -> list[dict]:
        out = [dict() for _ in range(self.nrows)]
        for (i, j), v in self._entries.items():
            out[i][j] = v
        return out

    def __matmul__(self, other: SparseMatrix) -> SparseMatrix:
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        f = self.field
        brows = other.rows()
        acc: dict = {}
        for (i, k), v in self._entries.items():
            for j, w in brows[k].items():
                acc[(i, j)] = acc.get((i, j), 0) + v * w
        return SparseMatrix._raw(self.nrows, other.ncols, f, {k: f.norm(v) for k, v in acc.items() if f.norm(v)})

    def __add__(self, other: SparseMatrix) -> SparseMatrix:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        f = self.field
        acc = dict(self._entries)
        for k, v in other._entries.items():
            acc[k] = f.norm(acc.get(k, 0) + v)
        return SparseMatrix._raw(self.nrows, self.ncols, f, {k: v for k, v in acc.items() if v})

    def __neg__(self) -> SparseMatrix:
        f = self.field
        return SparseMatrix._raw(self.nrows, self.ncols, f, {k: f.norm(-v) for k, v in self._entries.items()})

    def __sub__(self, other: SparseMatrix) -> SparseMatrix:
        return self + (-other)

    def scale(self, c) -> SparseMatrix:
        f = self.field
        c = f(c)
        return SparseMatrix._raw(
            self.nrows, self.ncols, f, {k: f.norm(v * c) for k, v in self._entries.items() if f.norm(v * c)}
        )

    def is_zero(self) -> bool:
        return not self._entries

    def first_nonzero(self):
        """Smallest ``(row, col, value)`` entry or None."""
        if not self._entries:
            return None
        k = min(self._entries)
        return (k[0], k[1], self._entries[k])

    def permuted(self, row_perm, col_perm) -> SparseMatrix:
        """Entry ``(i, j)`` moves to ``(row_perm[i], col_perm[j])``."""
        return SparseMatrix._raw(
            self.nrows, self.ncols, self.field, {(row_perm[i], col_perm[j]): v for (i, j), v in self._entries.items()}
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self._entries == other._entries

    def __repr__(self) -> str:
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz()}, field={self.field})"


def rank(m: SparseMatrix) -> int:
    if m.is_zero():
        return 0
    if m.field.is_rational:
        return _rank_rational(m)
    return rank_mod_p(m, kernel=_kernel)


def rank_mod_p(m: SparseMatrix, kernel=None) -> int:
    """Rank over F_p through a dense kernel (compiled by default)."""
    kernel = kernel or _kernel
    rows_used = sorted({i for i, _ in m._entries})
    cols_used = sorted({j for _, j in m._entries})
    if not rows_used:
        return 0
    rmap = {r: k for k, r in enumerate(rows_used)}
    cmap = {c: k for k, c in enumerate(cols_used)}
    a = np.zeros((len(rows_used), len(cols_used)), dtype=np.int64)
    if len(rows_used) < len(cols_used):
        for (i, j), v in m._entries.items():
            a[rmap[i], cmap[j]] = v
    else:
        a = a.T.copy()
        for (i, j), v in m._entries.items():
            a[cmap[j], rmap[i]] = v
    return int(kernel(np.ascontiguousarray(a), m.field.p))


def _rank_rational(m: SparseMatrix) -> int:
    rows = []
    for row in m.rows():
        if not row:
            continue
        den = 1
        for v in row.values():
            den = den * v.denominator // gcd(den, v.denominator)
        rows.append({j: int(v * den) for j, v in row.items()})
    return _sparse_integer_rank(rows)


def _sparse_integer_rank(rows: list[dict[int, int]]) -> int:
    """Fraction-free elimination; pivot = shortest row, its sparsest column."""
    cols: dict[int, set[int]] = {}
    for k, row in enumerate(rows):
        for j in row:
            cols.setdefault(j, set()).add(k)
    active = {k for k, row in enumerate(rows) if row}
    rank = 0
    while active:
        r = min(active, key=lambda k: (len(rows[k]), k))
        prow = rows[r]
        active.discard(r)
        if not prow:
            continue
        c = min(prow, key=lambda j: (len(cols[j]), j))
        a = prow[c]
        for j in prow:
            cols[j].discard(r)
        for s in list(cols[c]):
            srow = rows[s]
            b = srow[c]
            g = gcd(a, b)
            ma, mb = a // g, b // g
            new = {}
            for j, v in srow.items():
                new[j] = v * ma
            for j, v in prow.items():
                w = new.get(j, 0) - mb * v
                if w:
                    new[j] = w
                else:
                    new.pop(j, None)
            content = 0
            for v in new.values():
                content = gcd(content, v)
                if content == 1:
                    break
            if content > 1:
                new = {j: v // content for j, v in new.items()}
            for j in srow:
                if j not in new:
                    cols[j].discard(s)
            for j in new:
                if j not in srow:
                    cols.setdefault(j, set()).add(s)
            rows[s] = new
            if not new:
                active.discard(s)
        rank += 1
    return rank


def homology_rank(d_in: SparseMatrix, d_out: SparseMatrix) -> int:
    """``dim ker(d_out) - rank(d_in)`` after checking ``d_out @ d_in == 0``."""
    if d_out.ncols != d_in.nrows:
        raise ValueError(f"incompatible shapes {d_in.shape} then {d_out.shape}")
    comp = d_out @ d_in
    if not comp.is_zero():
        w = comp.first_nonzero()
        raise NotAComplexError(f"not a complex: composite has entry {w[2]} at ({w[0]}, {w[1]})", witness=w)
    return d_out.ncols - rank(d_out) - rank(d_in)
