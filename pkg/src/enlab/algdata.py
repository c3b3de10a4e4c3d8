"""Commutative nonunital algebras and symmetric bimodules by structure constants."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from pathlib import Path

from .exactla import QQ, Field, FieldError, parse_field


class AlgebraError(ValueError):
    pass


def _coeff(x) -> Fraction:
    return Fraction(x) if not isinstance(x, str) else Fraction(x.strip())


@dataclass(eq=False)
class AlgebraData:
    """``mul[(i, j)]`` expands ``e_i * e_j`` as ``{k: coefficient}``."""

    basis: tuple[str, ...]
    mul: dict[tuple[int, int], dict[int, Fraction]] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def product(self, i: int, j: int) -> dict[int, Fraction]:
        return self.mul.get((i, j), {})

    def multiply(self, u: dict[int, Fraction], v: dict[int, Fraction]) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for i, a in u.items():
            for j, b in v.items():
                for k, c in self.product(i, j).items():
                    out[k] = out.get(k, 0) + a * b * c
        return {k: c for k, c in out.items() if c}


@dataclass(eq=False)
class BimoduleData:
    """``action[(a, i)]`` expands ``m_a * e_i`` as ``{b: coefficient}``; used on both sides."""

    basis: tuple[str, ...]
    action: dict[tuple[int, int], dict[int, Fraction]] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def act(self, a: int, i: int) -> dict[int, Fraction]:
        return self.action.get((a, i), {})


@dataclass(eq=False)
class UnitalAlgebra:
    """``A_+``: the algebra with a unit adjoined as the last basis element."""

    algebra: AlgebraData
    unit: int

    @property
    def basis(self) -> tuple[str, ...]:
        return self.algebra.basis

    @property
    def dim(self) -> int:
        return self.algebra.dim

    def product(self, i: int, j: int) -> dict[int, Fraction]:
        return self.algebra.product(i, j)


def unitalize(a: AlgebraData, unit_name: str = "1") -> UnitalAlgebra:
    if unit_name in a.basis:
        raise AlgebraError(f"basis already contains {unit_name!r}; is the algebra unital already?")
    u = a.dim
    mul = {k: dict(v) for k, v in a.mul.items()}
    for i in range(u + 1):
        mul[(u, i)] = {i: Fraction(1)}
        mul[(i, u)] = {i: Fraction(1)}
    return UnitalAlgebra(AlgebraData(a.basis + (unit_name,), mul), u)


def validate(a: AlgebraData, m: BimoduleData, fld: Field | None = None) -> list[str]:
    """Failed structure identities, each with indices; empty when valid.

    With ``fld`` the identities are checked after coercion into that field.
    """
    fld = fld or QQ
    problems: list[str] = []

    def vec(d):
        try:
            out = {k: fld(c) for k, c in d.items()}
        except FieldError as exc:
            problems.append(str(exc))
            return {}
        return {k: v for k, v in out.items() if v}

    def norm(d):
        return {k: fld.norm(v) for k, v in d.items() if fld.norm(v)}

    dA, dM = a.dim, m.dim
    for (i, j), row in a.mul.items():
        if not (0 <= i < dA and 0 <= j < dA) or any(not 0 <= k < dA for k in row):
            problems.append(f"mul index out of range at ({i}, {j})")
    for (x, i), row in m.action.items():
        if not (0 <= x < dM and 0 <= i < dA) or any(not 0 <= b < dM for b in row):
            problems.append(f"action index out of range at ({x}, {i})")
    if problems:
        return problems

    mul = {(i, j): vec(a.product(i, j)) for i in range(dA) for j in range(dA)}
    act = {(x, i): vec(m.act(x, i)) for x in range(dM) for i in range(dA)}

    def times(u, i):
        out: dict = {}
        for l, c in u.items():
            for k, d in mul[(l, i)].items():
                out[k] = out.get(k, 0) + c * d
        return norm(out)

    def acts(u, i):
        out: dict = {}
        for b, c in u.items():
            for b2, d in act[(b, i)].items():
                out[b2] = out.get(b2, 0) + c * d
        return norm(out)

    for i, j in product(range(dA), repeat=2):
        if i < j and mul[(i, j)] != mul[(j, i)]:
            problems.append(f"commutativity fails: e{i}*e{j} != e{j}*e{i}")
    for i, j, k in product(range(dA), repeat=3):
        left = times(mul[(i, j)], k)
        right = {}
        for l, c in mul[(j, k)].items():
            for q, d in mul[(i, l)].items():
                right[q] = right.get(q, 0) + c * d
        if left != norm(right):
            problems.append(f"associativity fails: (e{i}e{j})e{k} != e{i}(e{j}e{k})")
    for x, i, j in product(range(dM), range(dA), range(dA)):
        left = acts(act[(x, i)], j)
        right = {}
        for l, c in mul[(i, j)].items():
            for b, d in act[(x, l)].items():
                right[b] = right.get(b, 0) + c * d
        if left != norm(right):
            problems.append(f"module associativity fails: (m{x}e{i})e{j} != m{x}(e{i}e{j})")
    return problems


def square_zero(g: int) -> AlgebraData:
    """``g`` generators with all products zero."""
    if g < 1:
        raise AlgebraError("square_zero needs at least one generator")
    return AlgebraData(tuple(f"x{k}" for k in range(1, g + 1)) if g > 1 else ("x",), {})


def trunc_poly(m: int) -> AlgebraData:
    """``x k[x] / (x^m)`` with basis ``x, x^2, ..., x^(m-1)``."""
    if m < 2:
        raise AlgebraError("trunc_poly needs m >= 2")
    names = tuple("x" if e == 1 else f"x{e}" for e in range(1, m))
    mul = {}
    for a, b in product(range(m - 1), repeat=2):
        if a + b + 2 < m:
            mul[(a, b)] = {a + b + 1: Fraction(1)}
    return AlgebraData(names, mul)


def trivial_module() -> BimoduleData:
    """The ground field with zero action."""
    return BimoduleData(("1",), {})


def regular_module(a: AlgebraData) -> BimoduleData:
    """``A`` acting on itself."""
    return BimoduleData(a.basis, {k: dict(v) for k, v in a.mul.items()})


BUILTINS = {"square_zero": square_zero, "trunc_poly": trunc_poly}


def builtin(name: str, param: int | None = None, module: str = "trivial") -> tuple[AlgebraData, BimoduleData]:
    """A builtin algebra with ``module`` either ``"trivial"`` or ``"A"``."""
    if ":" in name and param is None:
        name, raw = name.split(":", 1)
        param = int(raw)
    if name not in BUILTINS:
        raise AlgebraError(f"unknown builtin {name!r}; known: {sorted(BUILTINS)}")
    if param is None:
        param = 1 if name == "square_zero" else 3
    a = BUILTINS[name](param)
    return a, make_module(a, module)


def make_module(a: AlgebraData, module) -> BimoduleData:
    if isinstance(module, BimoduleData):
        return module
    if module == "trivial":
        return trivial_module()
    if module == "A":
        return regular_module(a)
    return load_module(module)


def _parse_terms(entries, width: int) -> dict[tuple[int, int], dict[int, Fraction]]:
    out: dict[tuple[int, int], dict[int, Fraction]] = {}
    for entry in entries:
        if len(entry) != width:
            raise AlgebraError(f"structure constant entry {entry!r} must have {width} fields")
        i, j, k, c = int(entry[0]), int(entry[1]), int(entry[2]), _coeff(entry[3])
        row = out.setdefault((i, j), {})
        row[k] = row.get(k, 0) + c
    return {key: {k: c for k, c in row.items() if c} for key, row in out.items()}


def module_from_json(data) -> BimoduleData:
    return BimoduleData(tuple(data["basis"]), _parse_terms(data.get("action", []), 4))


def algebra_from_json(data) -> tuple[AlgebraData, BimoduleData | None, Field]:
    """Parse the algebra file format; the module is None when not given."""
    a = AlgebraData(tuple(data["basis"]), _parse_terms(data.get("mul", []), 4))
    fld = parse_field(data.get("field", "Q"))
    mod = data.get("module")
    if isinstance(mod, str):
        m = make_module(a, mod)
    elif mod is not None:
        m = module_from_json(mod)
    else:
        m = None
    return a, m, fld


def load_algebra(path) -> tuple[AlgebraData, BimoduleData | None, Field]:
    return algebra_from_json(json.loads(Path(path).read_text()))


def load_module(path) -> BimoduleData:
    data = json.loads(Path(path).read_text())
    return module_from_json(data.get("module", data))


def _fmt(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def to_json(a: AlgebraData, m: BimoduleData, fld: Field = QQ) -> dict:
    return {
        "field": fld.to_json(),
        "basis": list(a.basis),
        "mul": [[i, j, k, _fmt(c)] for (i, j), row in sorted(a.mul.items()) for k, c in sorted(row.items())],
        "module": {
            "basis": list(m.basis),
            "action": [[x, i, b, _fmt(c)] for (x, i), row in sorted(m.action.items()) for b, c in sorted(row.items())],
        },
    }
