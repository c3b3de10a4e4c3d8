"""Verification suites behind ``enlab verify``.  Each returns a JSON-ready report
with a top-level ``"ok"`` flag."""
from __future__ import annotations

import random
from functools import lru_cache

from . import baroracle
from .algdata import AlgebraData, BimoduleData, trivial_module
from .coeffsys import (
    COVARIANT,
    CoefficientSystem,
    dual,
    dual_loday,
    extend_trivial,
    leaves_functor,
    loday,
    representable,
)
from .encomplex import build_chain, build_cochain, check_complex, check_multicomplex, h_zero, homology_table
from .epicat import canonical_key, compose, enumerate_hom, is_valid, random_representative
from .exactla import Field
from .trees import Tree, corolla, enumerate_by_degree


def _betti_json(b: dict) -> dict:
    return {str(k): v for k, v in sorted(b.items())}


def _failures(diags) -> list[dict]:
    return [d.to_json() for d in diags if not d.ok]


def complex_for(F: CoefficientSystem, D: int, n: int | None = None):
    return build_chain(F, D, n=n) if F.variance == COVARIANT else build_cochain(F, D, n=n)


def suite_d2(F: CoefficientSystem, D: int, n: int | None = None) -> dict:
    C = complex_for(F, D, n)
    bad = _failures(check_complex(C))
    return {"suite": "d2", "system": F.name, "direction": C.direction, "ok": not bad, "failures": bad}


def suite_multicomplex(F: CoefficientSystem, D: int, n: int | None = None) -> dict:
    C = complex_for(F, D, n)
    diags = check_multicomplex(C)
    bad = _failures(diags)
    return {
        "suite": "multicomplex",
        "system": F.name,
        "direction": C.direction,
        "checked": len(diags),
        "ok": not bad,
        "failures": bad,
    }


def suite_h0(F: CoefficientSystem, D: int, n: int | None = None) -> dict:
    C = complex_for(F, max(D, 2), n)
    table = homology_table(C)
    rank, _ = h_zero(F, n=C.n)
    return {"suite": "h0", "system": F.name, "h0": rank, "betti0": table[0], "ok": rank == table[0]}


def suite_oracle(a: AlgebraData, m: BimoduleData, n: int, D: int, fld: Field) -> dict:
    res = baroracle.compare_with_tree_complex(a, m, n, D, fld)
    return {"suite": "oracle", "n": n, "field": str(fld), **res.to_json()}


def suite_hochschild(a: AlgebraData, m: BimoduleData, D: int, fld: Field) -> dict:
    """Tree complex for ``n = 1`` against the standard Hochschild complex."""
    T = build_chain(loday(a, m, fld), D, n=1)
    H = baroracle.hochschild(a, m, D, fld)
    equal = {}
    for k in range(D + 1):
        pos = {(lab[0], tuple(lab[1:])): i for i, (_, lab) in enumerate(T.bases[k])}
        perm_k = [pos[key] for key in H.bases[k]]
        if k:
            equal[str(k)] = H.diff[k].permuted(perm_prev, perm_k) == T.diff[k]
        perm_prev = perm_k
    bt, bh = homology_table(T), H.betti()
    return {
        "suite": "hochschild",
        "field": str(fld),
        "matrices": equal,
        "bettiTree": _betti_json(bt),
        "bettiHochschild": _betti_json(bh),
        "ok": all(equal.values()) and bt == bh,
    }


def suite_projective(t: Tree, D: int, fld: Field) -> dict:
    table = homology_table(build_chain(representable(t, fld), D))
    expected = {m: (t.r[-1] + 1 if m == 0 else 0) for m in table}
    return {
        "suite": "projective",
        "tree": t.to_json(),
        "betti": _betti_json(table),
        "expected": _betti_json(expected),
        "ok": table == expected,
    }


def suite_bstar(n: int, D: int, fld: Field) -> dict:
    table = homology_table(build_chain(leaves_functor(n, fld), D))
    expected = {m: int(m == 0) for m in table}
    return {"suite": "bstar", "n": n, "betti": _betti_json(table), "expected": _betti_json(expected), "ok": table == expected}


def suite_duality(a: AlgebraData, m: BimoduleData, n: int, D: int, fld: Field) -> dict:
    chain = homology_table(build_chain(loday(a, m, fld), D, n=n))
    cochain = homology_table(build_cochain(dual_loday(a, m, fld), D, n=n))
    return {
        "suite": "duality",
        "n": n,
        "field": str(fld),
        "homology": _betti_json(chain),
        "cohomology": _betti_json(cochain),
        "ok": chain == cochain,
    }


# -- category properties ---------------------------------------------------------


@lru_cache(maxsize=None)
def _targets(t: Tree) -> tuple:
    out = []
    for d in range(sum(t.r) + 1):
        for s in enumerate_by_degree(t.n, d):
            homs = enumerate_hom(t, s)
            if homs:
                out.append((s, tuple(homs)))
    return tuple(out)


def random_tree(n: int, max_degree: int, rng: random.Random) -> Tree:
    pool = [t for d in range(max_degree + 1) for t in enumerate_by_degree(n, d)]
    return rng.choice(pool)


def random_morphism(t: Tree, rng: random.Random):
    """A uniformly chosen target, then a uniformly chosen morphism into it."""
    _, homs = rng.choice(_targets(t))
    return rng.choice(homs)


def random_chain(n: int, max_degree: int, length: int, rng: random.Random) -> list:
    """``length`` composable morphisms starting at a random tree."""
    t = random_tree(n, max_degree, rng)
    out = []
    for _ in range(length):
        h = random_morphism(t, rng)
        out.append(h)
        t = h.target
    return out


def suite_category(trials: int, seed: int, max_n: int = 3, max_degree: int = 4) -> dict:
    """Associativity, validity and representative independence of composition."""
    rng = random.Random(seed)
    failures = []
    for k in range(trials):
        n = 1 + k % max_n
        f, g, h = random_chain(n, max_degree, 3, rng)
        fg = compose(f, g)
        if not is_valid(fg):
            failures.append({"trial": k, "problem": "composite invalid", "f": repr(f), "g": repr(g)})
        if canonical_key(compose(fg, h)) != canonical_key(compose(f, compose(g, h))):
            failures.append({"trial": k, "problem": "not associative", "f": repr(f), "g": repr(g), "h": repr(h)})
        f2, g2 = random_representative(f, rng), random_representative(g, rng)
        if not (is_valid(f2) and is_valid(g2)) or canonical_key(compose(f2, g2)) != canonical_key(fg):
            failures.append({"trial": k, "problem": "depends on representatives", "f": repr(f2), "g": repr(g2)})
    return {"suite": "category", "trials": trials, "seed": seed, "ok": not failures, "failures": failures[:10]}


def functoriality(F: CoefficientSystem, n: int, trials: int, seed: int, max_degree: int = 4) -> dict:
    """``F(h o g) = F(h) F(g)`` and constancy on equivalence classes."""
    rng = random.Random(seed)
    failures = []
    for k in range(trials):
        g, h = random_chain(n, max_degree, 2, rng)
        composite = F.matrix_of(compose(g, h))
        if F.variance == COVARIANT:
            product = F.matrix_of(h) @ F.matrix_of(g)
        else:
            product = F.matrix_of(g) @ F.matrix_of(h)
        if composite != product:
            failures.append({"trial": k, "problem": "not functorial", "g": repr(g), "h": repr(h)})
        if F.matrix_of(random_representative(g, rng)) != F.matrix_of(g):
            failures.append({"trial": k, "problem": "depends on representative", "g": repr(g)})
    return {"system": F.name, "n": n, "trials": trials, "ok": not failures, "failures": failures[:10]}


def default_systems(a: AlgebraData, m: BimoduleData, n: int, fld: Field) -> list[CoefficientSystem]:
    """Every kind of system, for functoriality runs at ``n`` levels."""
    return [
        loday(a, m, fld),
        dual_loday(a, m, fld),
        dual(loday(a, m, fld)),
        extend_trivial(loday(a, trivial_module(), fld)),
        leaves_functor(n, fld),
        dual(leaves_functor(n, fld)),
        representable(corolla(n, 2), fld),
    ]


def suite_functoriality(a, m, fld: Field, trials: int, seed: int, max_n: int = 3, max_degree: int = 4) -> dict:
    reports = []
    for n in range(1, max_n + 1):
        for F in default_systems(a, m, n, fld):
            reports.append(functoriality(F, n, trials, seed + n, max_degree))
    return {"suite": "functoriality", "ok": all(r["ok"] for r in reports), "systems": reports}
