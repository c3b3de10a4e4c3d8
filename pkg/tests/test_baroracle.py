import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from enlab import encomplex
from enlab.algdata import builtin, regular_module, trivial_module, unitalize
from enlab.baroracle import (
    OracleError,
    bar_differential,
    coefficient_complexes,
    compare_with_tree_complex,
    degree,
    displayed_bar_differential,
    flatten,
    hochschild,
    iterated_bar,
    shuffle_product,
    twist_terms,
    words_in_degree,
)
from enlab.coeffsys import loday
from enlab.encomplex import DMAX, MERGE, build_chain, homology_table
from enlab.exactla import QQ, Field

from .oracles import fibonacci

F2 = Field(2)
A3, M3 = builtin("trunc_poly:3", module="A")


def _add_terms(*dicts):
    out = {}
    for d in dicts:
        for k, v in d.items():
            out[k] = out.get(k, 0) + v
    return {k: v for k, v in out.items() if v}


def test_displayed_and_koszul_bar_differentials_differ_by_sign():
    # x (x) x -> x^2 in the truncated polynomial algebra
    assert displayed_bar_differential(A3, (0, 0)) == {(1,): 1}
    assert bar_differential(A3, (0, 0)) == {(1,): -1}
    for w in words_in_degree(1, 3, A3.dim):
        neg = {k: -v for k, v in displayed_bar_differential(A3, w).items()}
        assert bar_differential(A3, w) == neg


def test_displayed_formula_is_level_one_only():
    with pytest.raises(OracleError):
        displayed_bar_differential(A3, ((0,), (0,)))


def test_shuffle_of_two_letters():
    c1, c2 = (0,), (1,)
    assert shuffle_product(c1, c2) == {(0, 1): 1, (1, 0): -1}


def test_shuffle_of_one_with_two_letters():
    # odd suspended letters: + - +; even ones: + + +
    assert shuffle_product((0,), (0, 0)) == {(0, 0, 0): 1}
    x = (0,)
    assert shuffle_product((x,), (x, x)) == {(x, x, x): 3}


def test_empty_words_are_rejected():
    with pytest.raises(OracleError):
        shuffle_product((), (0,))


level_one = st.lists(st.integers(0, 1), min_size=1, max_size=3).map(tuple)


@given(level_one, level_one)
def test_shuffle_is_graded_commutative(u, v):
    sign = -1 if degree(u) * degree(v) % 2 else 1
    assert shuffle_product(u, v) == {k: sign * c for k, c in shuffle_product(v, u).items()}


@given(level_one, level_one, level_one)
def test_shuffle_is_associative(u, v, w):
    def times(left: dict, right) -> dict:
        parts = []
        for k, c in left.items():
            parts.append({key: c * x for key, x in shuffle_product(k, right).items()})
        return _add_terms(*parts)

    def times_left(u, right: dict) -> dict:
        parts = []
        for k, c in right.items():
            parts.append({key: c * x for key, x in shuffle_product(u, k).items()})
        return _add_terms(*parts)

    assert times(shuffle_product(u, v), w) == times_left(u, shuffle_product(v, w))


@pytest.mark.parametrize("dim_a", [1, 2, 3])
@pytest.mark.parametrize("m", range(5))
def test_single_level_word_counts(dim_a, m):
    assert len(words_in_degree(1, m, dim_a)) == dim_a ** (m + 1)


@pytest.mark.parametrize("m", range(9))
def test_two_level_word_counts_on_one_letter(m):
    assert len(words_in_degree(2, m, 1)) == fibonacci(m + 1)


def test_flatten_reads_off_the_tree():
    assert flatten(((0,), (1, 0)), 2) == ((1, 2), ((0, 1, 1),), (0, 1, 0))


@pytest.mark.parametrize("name", ["trunc_poly:3", "square_zero:2"])
@pytest.mark.parametrize("n, D", [(1, 6), (2, 5), (3, 4)])
def test_bar_and_twisted_complexes_square_to_zero(name, n, D):
    a, m = builtin(name, module="A")
    chain, cochain = coefficient_complexes(a, m, n, D)
    for C in (chain, cochain, iterated_bar(a, n, D)):
        for k in C.diff:
            nxt = k - 1 if C.direction == "chain" else k + 1
            assert (C.out_of(nxt) @ C.diff[k]).is_zero()


def test_twist_pulls_out_extremal_letters():
    # a (x) [a0|a1] -> a*a0 (x) [a1] + a1*a (x) [a0]
    assert twist_terms((0, 1), 1) == [(1, 0, (1,)), (1, 1, (0,))]
    assert twist_terms((0,), 1) == []


def test_twist_only_touches_innermost_words():
    # one outer suspension precedes the inner word; [1] is too short to shrink
    terms = twist_terms(((0, 1), (1,)), 2)
    assert terms == [(-1, 0, ((1,), (1,))), (-1, 1, ((0,), (1,)))]


def test_trivial_coefficients_kill_the_twist():
    a, k = builtin("trunc_poly:3")
    chain, _ = coefficient_complexes(a, k, 2, 4)
    assert all(chain.twist_part[m].is_zero() for m in chain.twist_part)


def test_bar_homology_of_truncated_polynomials():
    # Tor over k[x]/x^3 is one-dimensional in every degree
    assert iterated_bar(A3, 1, 6).betti() == {m: 1 for m in range(6)}


def test_square_zero_hochschild_has_no_differential():
    a, k = builtin("square_zero:2")
    C = hochschild(a, k, 5)
    assert all(C.diff[l].is_zero() for l in C.diff)
    assert C.betti() == {m: 2 ** (m + 1) for m in range(5)}


@pytest.mark.parametrize("fld", [QQ, F2])
def test_hochschild_squares_to_zero(fld):
    C = hochschild(A3, M3, 8, fld)
    for l in range(2, 9):
        assert (C.diff[l - 1] @ C.diff[l]).is_zero()


def test_hochschild_agrees_with_single_level_tree_complex():
    T = build_chain(loday(A3, M3), 6, n=1)
    H = hochschild(A3, M3, 6)
    assert homology_table(T) == H.betti()


@pytest.mark.parametrize(
    "name, module, n, D, fld",
    [
        ("trunc_poly:3", "A", 1, 8, QQ),
        ("trunc_poly:3", "A", 1, 8, F2),
        ("trunc_poly:2", "A", 2, 6, QQ),
        ("trunc_poly:3", "A", 2, 5, F2),
        ("square_zero:1", "trivial", 2, 8, QQ),
        ("square_zero:2", "A", 3, 4, QQ),
    ],
)
def test_tree_complex_matches_oracle(name, module, n, D, fld):
    a, m = builtin(name, module=module)
    result = compare_with_tree_complex(a, m, n, D, fld)
    assert result.ok, result.to_json()
    assert result.betti_tree == result.betti_oracle


def test_unitalized_coefficients_match():
    plus = unitalize(A3).algebra
    result = compare_with_tree_complex(A3, regular_module(plus), 2, 4)
    assert result.ok


@pytest.mark.parametrize("part", [MERGE, DMAX])
def test_corrupted_tree_sign_is_located(monkeypatch, part):
    original = encomplex.differential_terms.__wrapped__

    def corrupted(t):
        out = list(original(t))
        for k, (j, p, s, h) in enumerate(out):
            if p == part and j == t.n:
                out[k] = (j, p, -s, h)
                break
        return tuple(out)

    monkeypatch.setattr(encomplex, "differential_terms", corrupted)
    result = compare_with_tree_complex(A3, M3, 2, 3, betti=False)
    assert not result.ok
    bad = result.mismatch
    assert {"degree", "source", "target", "tree_entry", "oracle_entry", "tree_terms"} <= set(bad)
    assert bad["tree_terms"] and {"word", "label", "tree"} <= set(bad["source"])
    assert result.to_json()["mismatch"] == bad


@pytest.mark.parametrize("fld", [QQ, F2])
@pytest.mark.parametrize("n, D", [(1, 6), (2, 5)])
def test_chain_and_cochain_homology_agree(fld, n, D):
    chain, cochain = coefficient_complexes(A3, M3, n, D, fld)
    assert chain.betti() == cochain.betti()


@settings(max_examples=10)
@given(st.sampled_from(["trunc_poly:2", "trunc_poly:3", "square_zero:1", "square_zero:2"]), st.integers(1, 3))
def test_oracle_agrees_for_trivial_coefficients(name, n):
    a, _ = builtin(name)
    D = {1: 5, 2: 4, 3: 4}[n]
    assert compare_with_tree_complex(a, trivial_module(), n, D).ok
