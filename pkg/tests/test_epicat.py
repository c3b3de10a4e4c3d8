import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from enlab.epicat import (
    PLUS,
    MorphismError,
    Shuffle,
    TreeMorphism,
    all_representatives,
    canonical,
    canonical_key,
    compose,
    delete_leaf,
    enumerate_hom,
    enumerate_shuffles,
    equivalent,
    identity,
    is_valid,
    merge_shuffle,
    merge_terms,
    parse_morphism,
    random_representative,
    restriction_morphism,
    shuffle_sign,
    top_merge,
    validity_problems,
)
from enlab.trees import Tree, corolla, enumerate_by_degree, linear_tree
from enlab.verify import random_chain

from .oracles import brute_hom_count

T12 = Tree((1, 2), ((0, 0, 1),))


def _lv(h):
    return ["".join("+" if v == PLUS else str(v) for v in level) for level in h.levels]


def test_hom_between_corollas():
    homs = enumerate_hom(corolla(1, 2), corolla(1, 1))
    assert len(homs) == 3
    assert sorted(_lv(h)[0] for h in homs) == ["+0", "0+", "00"]


def test_identity_is_in_endomorphisms():
    keys = {canonical_key(h) for h in enumerate_hom(T12, T12)}
    assert canonical_key(identity(T12)) in keys


@pytest.mark.parametrize("n", [1, 2, 3])
def test_linear_tree_is_terminal(n):
    for m in range(4):
        for t in enumerate_by_degree(n, m):
            assert len(enumerate_hom(t, linear_tree(n))) >= 1


def test_no_morphisms_to_larger_trees():
    assert enumerate_hom(corolla(1, 1), corolla(1, 2)) == []
    with pytest.raises(MorphismError):
        enumerate_hom(corolla(1, 1), corolla(2, 1))


@pytest.mark.parametrize(
    "t",
    [corolla(1, 3), T12, Tree((0, 2), ((0, 0, 0),)), Tree((1, 1), ((0, 1),)), Tree((0, 1, 2), ((0, 0), (0, 1, 1)))],
)
def test_hom_counts_match_exhaustive_search(t):
    for m in range(sum(t.r) + 1):
        for s in enumerate_by_degree(t.n, m):
            assert len(enumerate_hom(t, s)) == brute_hom_count(t, s), s


def test_restriction_morphism_levels():
    assert _lv(restriction_morphism(T12, {0, 2})) == ["01", "0+1"]
    assert _lv(restriction_morphism(T12, {0, 1})) == ["00", "01+"]
    with pytest.raises(MorphismError, match="interval"):
        restriction_morphism(corolla(1, 3), {0, 2})


def test_generators_are_valid():
    t = Tree((1, 3), ((0, 0, 1, 1),))
    assert _lv(top_merge(t, 0)) == ["01", "0012"]
    assert _lv(delete_leaf(t, 3)) == ["01", "012+"]
    with pytest.raises(MorphismError):
        top_merge(t, 1)
    with pytest.raises(MorphismError):
        delete_leaf(corolla(2, 1), 0)


def test_merge_shuffles_and_signs():
    terms = merge_terms(T12, 1, 0)
    assert [e for e, _ in terms] == [1, -1, 1]
    assert [_lv(h)[1] for _, h in terms] == ["012", "021", "120"]
    assert all(is_valid(h) for _, h in terms)


def test_shuffle_sign_uses_degrees_plus_one():
    sigma = Shuffle(1, 1, (1, 0))
    assert shuffle_sign(sigma, [0], [0]) == -1
    assert shuffle_sign(sigma, [1], [0]) == 1
    with pytest.raises(MorphismError):
        shuffle_sign(sigma, [0, 0], [0])


def test_shuffle_rejects_non_shuffles():
    with pytest.raises(MorphismError):
        Shuffle(2, 1, (1, 0, 2))
    with pytest.raises(MorphismError):
        Shuffle(1, 1, (0, 0))


@pytest.mark.parametrize("a, b, count", [(0, 3, 1), (1, 1, 2), (2, 2, 6), (3, 2, 10)])
def test_shuffle_count(a, b, count):
    assert len(enumerate_shuffles(a, b)) == count


def test_merge_shuffle_checks_block_sizes():
    with pytest.raises(MorphismError):
        merge_shuffle(T12, 1, 0, Shuffle(1, 1, (0, 1)))


def test_validity_reports_problems():
    bad = TreeMorphism(corolla(1, 2), corolla(1, 1), ((1, 0),))
    assert validity_problems(bad)
    gap = TreeMorphism(corolla(1, 3), corolla(1, 1), ((0, PLUS, 0),))
    assert any("interval" in p for p in validity_problems(gap))
    twisted = TreeMorphism(T12, Tree((1, 1), ((0, 1),)), ((0, 1), (1, 0, 1)))
    assert any("commute" in p for p in validity_problems(twisted))


def test_equivalence_ignores_deleted_branches():
    # the middle branch is deleted, so its root may go to either side
    t = Tree((2, 2), ((0, 1, 2),))
    s = Tree((1, 1), ((0, 1),))
    h1 = TreeMorphism(t, s, ((0, 0, 1), (0, PLUS, 1)))
    h2 = TreeMorphism(t, s, ((0, 1, 1), (0, PLUS, 1)))
    assert is_valid(h1) and is_valid(h2)
    assert equivalent(h1, h2)
    assert canonical(h2).levels == h1.levels
    other = TreeMorphism(t, s, ((0, 0, 1), (PLUS, 0, 1)))
    assert not equivalent(h1, other)


def test_equivalence_requires_equal_endpoints():
    with pytest.raises(MorphismError):
        equivalent(identity(T12), identity(corolla(2, 1)))


def test_compose_checks_endpoints():
    with pytest.raises(MorphismError):
        compose(identity(T12), identity(corolla(2, 1)))


def test_basepoint_is_absorbing():
    t = corolla(1, 3)
    g = delete_leaf(t, 0)
    h = delete_leaf(g.target, 1)
    assert compose(g, h).top == (PLUS, 0, PLUS)


def test_morphism_json_round_trip():
    h = merge_terms(T12, 1, 0)[1][1]
    assert parse_morphism(h.to_json()) == h


def test_representatives_of_a_class_share_keys():
    rng = random.Random(5)
    for h in enumerate_hom(Tree((1, 2), ((0, 0, 1),)), corolla(2, 1)):
        for _ in range(5):
            g = random_representative(h, rng)
            assert is_valid(g) and equivalent(g, h)


def test_all_representatives_cover_every_class():
    t, s = corolla(1, 3), corolla(1, 2)
    reps = all_representatives(t, s)
    assert {canonical_key(h) for h in reps} == {canonical_key(h) for h in enumerate_hom(t, s)}


@given(st.integers(1, 3), st.integers(0, 10**6))
def test_associativity(n, seed):
    f, g, h = random_chain(n, 4, 3, random.Random(seed))
    assert canonical_key(compose(compose(f, g), h)) == canonical_key(compose(f, compose(g, h)))


@given(st.integers(1, 3), st.integers(0, 10**6))
def test_composition_independent_of_representatives(n, seed):
    rng = random.Random(seed)
    f, g = random_chain(n, 4, 2, rng)
    f2, g2 = random_representative(f, rng), random_representative(g, rng)
    assert is_valid(compose(f2, g2))
    assert canonical_key(compose(f2, g2)) == canonical_key(compose(f, g))


@given(st.integers(1, 3), st.integers(0, 10**6))
def test_identities_are_units(n, seed):
    (f,) = random_chain(n, 4, 1, random.Random(seed))
    assert canonical_key(compose(identity(f.source), f)) == canonical_key(f)
    assert canonical_key(compose(f, identity(f.target))) == canonical_key(f)


@given(st.integers(1, 3), st.integers(0, 10**6))
def test_enumerated_morphisms_are_canonical(n, seed):
    (f,) = random_chain(n, 4, 1, random.Random(seed))
    assert canonical(f) == f
    assert is_valid(f)
