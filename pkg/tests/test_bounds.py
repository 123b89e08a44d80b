import random

import pytest

from parsikern import bounds
from parsikern.bounds import (BLUE, RED, certified_lower_bound, check_greedy,
                              greedy_leg_disjoint, lg, lift_character, phase1_colouring,
                              phase2_extend, quartet_geometry, witness_character)
from parsikern.cli import gen_random_pair
from parsikern.exact import (dmp_exact, dtbr_hitting_set, incompatible_quartets, leg_mask)
from parsikern.fitch import parsimony_score
from parsikern.newick_io import parse_newick
from parsikern.treecore import QuartetTopology, TreeError, restrict

from _instances import caterpillar, leg_disjoint_instance, q4

CASE_SEEDS = {
    "shared-pendant": [(12, 2)],
    "pendant-pair": [(12, 66)],
    "side-three-legs": [(16, 130), (16, 223)],
    "side-quartet-leg": [(12, 297), (12, 362)],
    "side-two-quartets": [(12, 842), (12, 1882), (12, 1888)],
}


def test_lg_floor():
    assert lg(1) == lg(2) == 1.0
    assert lg(16) == 4.0


def test_geometry_of_quartet_tree():
    T1, _ = q4()
    g = quartet_geometry(T1, QuartetTopology.parse("a,b|c,d"))
    assert len(g.leg_ab) == len(g.leg_cd) == 2 and len(g.backbone) == 1
    assert g.reach == {x: frozenset(x) for x in "abcd"}
    assert g.joint_ab == T1.parent("a") and g.joint_cd == T1.parent("c")


def test_geometry_reach_sets_on_caterpillar():
    T = parse_newick(caterpillar("abcdef"))
    g = quartet_geometry(T, QuartetTopology.parse("a,c|d,f"))
    assert g.reach["a"] == {"a", "b"} and g.reach["c"] == {"c"}
    assert g.reach["d"] == {"d"} and g.reach["f"] == {"e", "f"}
    # reach sets and the backbone's hanging leaves partition the taxa
    assert sum(len(s) for s in g.reach.values()) == 6


def test_geometry_reach_shrinks_after_cut():
    T = parse_newick(caterpillar("abcdef"))
    top = QuartetTopology.parse("a,c|d,f")
    first = quartet_geometry(T, QuartetTopology.parse("a,b|e,f")).first_edges["f"]
    g = quartet_geometry(T, top, cut=1 << T.edge_id(T.leaf("e"), T.parent("e")))
    assert g.reach["f"] == {"f"}
    with pytest.raises(TreeError):
        quartet_geometry(T, top, cut=1 << first)


def test_greedy_examples():
    T1, T2 = q4()
    res = greedy_leg_disjoint(T1, T2)
    assert [q.taxa for q in res.quartets] == [("a", "b", "c", "d")]
    assert res.hitting_set_size == 4 and res.trace[0].path_length == 2
    assert check_greedy(T1, res, d_tbr=1) == []
    same = greedy_leg_disjoint(T1, T1)
    assert same.quartets == [] and same.edges == []


@pytest.mark.parametrize("seed", range(30))
def test_greedy_guarantees(seed):
    n = 6 + seed % 11
    T1, T2 = gen_random_pair(n, 1 + seed % 4, seed)
    res = greedy_leg_disjoint(T1, T2)
    d = dtbr_hitting_set(T1, T2)[0] if n <= 11 else None
    assert check_greedy(T1, res, d) == []
    if d is not None:
        assert res.hitting_set_size >= d


def test_phase1_on_quartet():
    T1, T2 = q4()
    w = phase1_colouring(T1, T2, incompatible_quartets(T1, T2))
    assert w.character == {"a": RED, "c": RED, "b": BLUE, "d": BLUE}
    assert (w.beta, w.delta, w.bound) == (2, 1, 1)


def test_phase1_empty_and_overlap():
    T1, T2 = q4()
    assert phase1_colouring(T1, T2, []).bound == 0
    w = witness_character(T1, T2, [])
    assert w.bound == 0 and w.selected == []
    T1, T2 = gen_random_pair(8, 3, 1)
    Q = incompatible_quartets(T1, T2)
    pair = next([q, r] for q in Q for r in Q if q != r and leg_mask(T1, q.t1) & leg_mask(T1, r.t1))
    with pytest.raises(ValueError):
        phase1_colouring(T1, T2, pair)


def test_phase2_with_nothing_left():
    T1, T2 = q4()
    w = phase1_colouring(T1, T2, incompatible_quartets(T1, T2))
    before = (w.beta, w.delta, len(w.selected))
    w = phase2_extend(T1, T2, w, [])
    assert (w.beta, w.delta, len(w.selected)) == before


def _recorded(monkeypatch):
    log = []
    real = bounds._commit

    def spy(w, case, added, col):
        b0, d0 = w.beta, w.delta
        real(w, case, added, col)
        log.append((case, w.beta - b0, w.delta - d0, len(added)))
    monkeypatch.setattr(bounds, "_commit", spy)
    return log


@pytest.mark.parametrize("case,n,seed", [(c, n, s) for c, v in CASE_SEEDS.items() for n, s in v])
def test_pinned_case_instances(monkeypatch, case, n, seed):
    log = _recorded(monkeypatch)
    T1, T2, Q = leg_disjoint_instance(n, seed)
    w = witness_character(T1, T2, Q)
    assert case in [s.case for s in w.steps]
    for _, db, dd, k in log:
        assert db - dd >= 1 and 1 <= k <= 3
    if case == "shared-pendant":
        assert [(db, dd) for c, db, dd, _ in log if c == "shared-pendant"] == [(2, 1)]
    assert 3 * w.bound >= len(w.selected) and 9 * len(w.selected) >= len(Q)
    f = w.character
    assert parsimony_score(restrict(T1, f), f) - parsimony_score(restrict(T2, f), f) >= w.bound


@pytest.mark.parametrize("seed", range(40))
def test_witness_on_block_instances(seed):
    T1, T2, Q = leg_disjoint_instance(12 + 4 * (seed % 6), 5000 + seed)
    w = witness_character(T1, T2, Q)
    assert 3 * w.bound >= len(w.selected) and 9 * len(w.selected) >= len(Q)


def test_witness_bound_is_sound():
    for seed in range(15):
        T1, T2 = gen_random_pair(8, 2, seed)
        res = greedy_leg_disjoint(T1, T2)
        w = witness_character(T1, T2, res.quartets)
        assert w.bound <= dmp_exact(T1, T2, 2)


def test_lift_character_examples():
    T1, T2 = q4()
    f = {"a": 0, "b": 1, "c": 0, "d": 1}
    assert lift_character(T2, T1, f) == f
    H1 = parse_newick("(((a,e),(b,f)),((c,g),(d,h)));")
    H2 = parse_newick("(((a,e),(c,g)),((b,f),(d,h)));")
    g = lift_character(H2, H1, f)
    assert {x: g[x] for x in f} == f and set(g) == set(H1.taxa)
    assert parsimony_score(H1, g) - parsimony_score(H2, g) >= 1
    const = lift_character(H1, H2, {"a": 1, "c": 1})
    assert set(const.values()) == {1}
    with pytest.raises(ValueError):
        lift_character(H1, H2, {"zz": 0})


@pytest.mark.parametrize("seed", range(10))
def test_lifted_gap_dominates_restricted_gap(seed):
    rng = random.Random(seed)
    T1, T2 = gen_random_pair(9, 3, seed)
    Y = rng.sample(T1.taxa, 5)
    f = {x: rng.randrange(2) for x in Y}
    g = lift_character(T1, T2, f)
    sub = parsimony_score(restrict(T2, Y), f) - parsimony_score(restrict(T1, Y), f)
    assert parsimony_score(T2, g) - parsimony_score(T1, g) >= sub


def test_certified_lower_bound_examples():
    T1, T2 = q4()
    c = certified_lower_bound(T1, T2)
    assert c.claimed_bound == 1 == dmp_exact(T1, T2, 2)
    assert c.tbr_upper_bound >= 1
    same = certified_lower_bound(T1, T1)
    assert same.claimed_bound == 0 and same.tbr_upper_bound == 0 and same.quartets == []
    assert certified_lower_bound(T1, T2, threads=2) == c
