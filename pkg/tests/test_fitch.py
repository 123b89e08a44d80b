import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from parsikern.cli import random_tree
from parsikern.fitch import (ROOT, BatchScorer, Character, CharacterError, OracleCapError,
                             brute_force_parsimony_oracle, fitch_extension, fitch_map,
                             mutation_count, parsimonious_extension, parsimony_score)
from parsikern.newick_io import parse_newick
from parsikern.treecore import build_tree, induced_subtree, restrict

from _instances import caterpillar, q4

ALT = {"a": 0, "b": 1, "c": 0, "d": 1}


def backbone(T):
    return next((u, v) for u, v in T.edges if not T.is_leaf(u) and not T.is_leaf(v))


def test_constant_character():
    T = parse_newick(caterpillar("abcdef"))
    f = dict.fromkeys(T.taxa, 0)
    F = fitch_map(T, f)
    assert all(F.kind[v] == "intersection" and F.states(v) == {0}
               for v in T.internal_vertices())
    assert parsimony_score(T, f) == 0 == brute_force_parsimony_oracle(T, f)
    ext = fitch_extension(T, f)
    assert set(ext.values()) == {0} and mutation_count(T, ext) == 0


def test_fitch_map_on_quartet_rooted_at_backbone():
    T1, T2 = q4()
    F = fitch_map(T1, ALT, backbone(T1))
    parents = [T1.parent("a"), T1.parent("c")]
    assert [F.kind[p] for p in parents] == ["union", "union"]
    assert all(F.states(p) == {0, 1} for p in parents)
    assert F.kind[ROOT] == "intersection"

    F = fitch_map(T2, ALT, backbone(T2))
    assert F.kind[T2.parent("a")] == "intersection" and F.states(T2.parent("a")) == {0}
    assert F.kind[T2.parent("b")] == "intersection" and F.states(T2.parent("b")) == {1}
    assert F.kind[ROOT] == "union"


def test_quartet_scores():
    T1, T2 = q4()
    assert parsimony_score(T1, ALT) == 2
    assert parsimony_score(T2, ALT) == 1
    assert brute_force_parsimony_oracle(T1, {"a": 0, "b": 0, "c": 1, "d": 1}) == 1


def test_extension_on_quartet():
    T1, _ = q4()
    ext = fitch_extension(T1, ALT)
    assert mutation_count(T1, ext) == 2
    assert all(ext[T1.leaf(x)] == s for x, s in ALT.items())


def test_mutation_count_alternating_path():
    m = 6
    T = build_tree([(i, i + 1) for i in range(m)], {0: "a", m: "b"})
    ext = {v: v % 2 for v in range(m + 1)}
    assert mutation_count(T, ext) == m
    with pytest.raises(CharacterError):
        mutation_count(T, {0: 0})


def test_character_validation():
    with pytest.raises(CharacterError):
        Character({"a": 2}, 2)
    with pytest.raises(CharacterError):
        Character({"a": 0}, 65)
    T1, _ = q4()
    with pytest.raises(CharacterError):
        parsimony_score(T1, {"a": 0, "b": 1})


def test_oracle_cap():
    T = random_tree(15, random.Random(0))
    with pytest.raises(OracleCapError):
        brute_force_parsimony_oracle(T, dict.fromkeys(T.taxa, 0))


def random_instance(rng, n_max=7, t_max=4):
    n = rng.randint(2, n_max)
    T = random_tree(n, rng)
    t = rng.randint(1, t_max)
    return T, {x: rng.randrange(t) for x in T.taxa}


@pytest.mark.parametrize("seed", range(60))
def test_score_equals_brute_force(seed):
    T, f = random_instance(random.Random(seed))
    assert parsimony_score(T, f) == brute_force_parsimony_oracle(T, f)


@pytest.mark.parametrize("seed", range(30))
def test_root_independence(seed):
    T, f = random_instance(random.Random(seed), n_max=9)
    counts = {fitch_map(T, f, e).union_count for e in T.edges}
    assert len(counts) == 1


@pytest.mark.parametrize("seed", range(30))
def test_extension_is_optimal(seed):
    T, f = random_instance(random.Random(seed), n_max=10)
    ext = fitch_extension(T, f)
    assert mutation_count(T, ext) == parsimony_score(T, f)
    assert all(ext[T.leaf(x)] == s for x, s in f.items())


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_state_renaming_invariance(seed):
    rng = random.Random(seed)
    T, f = random_instance(rng, n_max=10)
    perm = list(range(4))
    rng.shuffle(perm)
    assert parsimony_score(T, {x: perm[s] for x, s in f.items()}) == parsimony_score(T, f)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_induced_subtree_scores_like_restriction(seed):
    rng = random.Random(seed)
    T, f = random_instance(rng, n_max=10)
    Y = rng.sample(T.taxa, rng.randint(1, T.n_leaves))
    g = {x: f[x] for x in Y}
    s = parsimony_score(induced_subtree(T, Y), g)
    assert s == parsimony_score(restrict(T, Y), g)
    assert s <= parsimony_score(T, f)


def test_parsimonious_extension_on_caterpillar():
    T = parse_newick(caterpillar("abcdef"))
    Y = ["a", "c", "d", "f"]
    sub = induced_subtree(T, Y)
    rng = random.Random(3)
    for _ in range(20):
        fbar = {v: rng.randrange(2) for v in range(sub.n_vertices)}
        ext = parsimonious_extension(T, Y, fbar)
        assert len(ext) == T.n_vertices
        assert mutation_count(T, ext) == mutation_count(sub, fbar)


def test_parsimonious_extension_trivial_cases():
    T = parse_newick(caterpillar("abcdef"))
    full = induced_subtree(T, T.taxa)
    fbar = {v: v % 3 for v in range(full.n_vertices)}
    ext = parsimonious_extension(T, T.taxa, fbar)
    assert ext == {full.origin[v]: s for v, s in fbar.items()}
    sub = induced_subtree(T, ["b", "e"])
    assert set(parsimonious_extension(T, ["b", "e"], dict.fromkeys(range(sub.n_vertices), 1)).values()) == {1}
    with pytest.raises(CharacterError):
        parsimonious_extension(T, ["b", "e"], {})


def test_batch_scorer_matches_single():
    rng = random.Random(5)
    T = random_tree(9, rng)
    states = np.array([[rng.randrange(4) for _ in T.taxa] for _ in range(50)])
    want = [parsimony_score(T, dict(zip(T.taxa, map(int, row)))) for row in states]
    assert BatchScorer(T).score(states).tolist() == want
    T1, T2 = q4()
    row = np.array([[ALT[x] for x in T1.taxa]])
    assert BatchScorer(T1).score(row).tolist() == [2]
    assert BatchScorer(T2).score(row).tolist() == [1]
