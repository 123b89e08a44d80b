"""Acceptance suite: ten property checks against the exact oracles.

Each test prints one PASS/FAIL line (visible even with output capture) and
then asserts zero violations.
"""

import csv
import functools
import os
import random
import subprocess
import sys
import time

import pytest

from parsikern.bounds import certified_lower_bound, check_greedy, greedy_leg_disjoint, lg
from parsikern.cli import gen_random_pair, random_tree
from parsikern.exact import (PARTITION_CAP, cut_to_partition, dmp_exact, dtbr_hitting_set,
                             dtbr_partition_oracle, incompatible_quartets, is_agreement_forest,
                             leg_mask)
from parsikern.fitch import brute_force_parsimony_oracle, parsimony_score
from parsikern.kernelize import fully_reduce
from parsikern.newick_io import read_certificate, write_certificate
from parsikern.treecore import induced_subtree, restrict
from parsikern.verify import verify_certificate

from _tamper import KINDS, mutate


@pytest.fixture(scope="module")
def stats_dir(tmp_path_factory):
    """Where the experiment CSVs go: $PARSIKERN_STATS_DIR or a temp dir."""
    env = os.environ.get("PARSIKERN_STATS_DIR")
    if env:
        os.makedirs(env, exist_ok=True)
        return env
    return str(tmp_path_factory.mktemp("stats"))


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


@pytest.fixture
def report(capsys):
    def emit(number, title, checked, violations, extra=""):
        status = "PASS" if not violations else "FAIL"
        line = f"[{status}] criterion {number:2d} {title}: {checked} checked, {len(violations)} violations"
        if extra:
            line += f"; {extra}"
        with capsys.disabled():
            print("\n" + line)
            for v in violations[:5]:
                print(f"    {v}")
        assert not violations, line
    return emit


def random_pair(n, seed):
    """Mix of near pairs (few TBR moves) and unrelated pairs."""
    rng = random.Random(seed)
    moves = rng.choice([1, 2, 3, n])
    return gen_random_pair(n, moves, seed)


def d_tbr(T1, T2):
    if T1.n_leaves <= PARTITION_CAP:
        return dtbr_partition_oracle(T1, T2)
    return dtbr_hitting_set(T1, T2)[0]


@functools.lru_cache(maxsize=None)
def reduction_corpus():
    """200 pairs with n <= 9 and their kernels (criteria 4, 5, 9)."""
    out = []
    for i in range(200):
        n = 4 + i % 6
        T1, T2 = random_pair(n, 40_000 + i)
        K1, K2, _ = fully_reduce(T1, T2)
        out.append((i, T1, T2, K1, K2))
    return tuple(out)


def test_criterion_01_fitch_correctness(report):
    start = time.perf_counter()
    bad = []
    for i in range(500):
        rng = random.Random(10_000 + i)
        n = rng.randint(2, 7)
        t = rng.randint(1, 4)
        T = random_tree(n, rng)
        f = {x: rng.randrange(t) for x in T.taxa}
        a, b = parsimony_score(T, f), brute_force_parsimony_oracle(T, f)
        if a != b:
            bad.append(f"seed {i}: fitch {a} != oracle {b}")
    secs = time.perf_counter() - start
    report(1, "Fitch = brute force", 500, bad, f"{secs:.1f}s")


def test_criterion_02_restriction_lemmas(report):
    start = time.perf_counter()
    bad = []
    for i in range(300):
        rng = random.Random(20_000 + i)
        n = rng.randint(4, 8)
        T1, T2 = random_pair(n, 20_000 + i)
        Y = rng.sample(T1.taxa, rng.randint(1, n))
        f = {x: rng.randrange(rng.randint(1, 4)) for x in Y}
        a, b = parsimony_score(induced_subtree(T1, Y), f), parsimony_score(restrict(T1, Y), f)
        if a != b:
            bad.append(f"seed {i}: l(T(Y))={a} != l(T|Y)={b}")
        full = dmp_exact(T1, T2, 2)
        sub = dmp_exact(restrict(T1, Y), restrict(T2, Y), 2)
        if sub > full:
            bad.append(f"seed {i}: d_MP on Y {sub} > {full}")
    report(2, "restriction properties", 300, bad, f"{time.perf_counter() - start:.1f}s")


def test_criterion_03_tbr_oracle_agreement(report):
    start = time.perf_counter()
    bad = []
    feasible_total = 0
    for i in range(200):
        n = 4 + i % 5
        T1, T2 = random_pair(n, 30_000 + i)
        value, _ = dtbr_hitting_set(T1, T2)
        ref = dtbr_partition_oracle(T1, T2)
        if value != ref:
            bad.append(f"seed {i}: hitting set {value} != partition {ref}")
        legs = [leg_mask(T1, q.t1) for q in incompatible_quartets(T1, T2)]
        seen = {}
        for mask in range(1 << len(T1.edges)):
            if not all(L & mask for L in legs):
                continue
            feasible_total += 1
            blocks = tuple(cut_to_partition(T1, [e for e in range(len(T1.edges)) if mask >> e & 1]))
            if blocks not in seen:
                seen[blocks] = bool(is_agreement_forest(T1, T2, blocks))
                if not seen[blocks]:
                    bad.append(f"seed {i}: feasible cut {blocks} is not an agreement forest")
    report(3, "TBR oracles agree", 200, bad,
           f"{feasible_total} feasible hitting sets checked, {time.perf_counter() - start:.1f}s")


def test_criterion_04_reduction_safety(report):
    start = time.perf_counter()
    bad = []
    checks = 0
    for i, T1, T2, K1, K2 in reduction_corpus():
        for t in (2, 3, None):
            checks += 1
            a, b = dmp_exact(T1, T2, t), dmp_exact(K1, K2, t)
            if a != b:
                bad.append(f"pair {i} t={t}: {a} before, {b} after reduction")
    report(4, "reduction preserves d_MP", checks, bad, f"{time.perf_counter() - start:.1f}s")


def test_criterion_05_kernel_size(report, stats_dir):
    bad = []
    ratios = []
    rows = []
    for i, T1, _, K1, K2 in reduction_corpus():
        n = K1.n_leaves
        d = d_tbr(K1, K2) if n >= 4 else 0
        # identical trees collapse to at most three leaves, where d = 0
        if (d == 0 and n > 3) or (d > 0 and n > 20 * d):
            bad.append(f"pair {i}: kernel has {n} leaves with d_TBR={d}")
        if d:
            ratios.append(n / d)
        rows.append((i, T1.n_leaves, n, d, f"{n / d:.3f}" if d else ""))
    path = os.path.join(stats_dir, "kernel_ratios.csv")
    write_csv(path, ("pair", "n", "kernel_leaves", "d_tbr", "ratio"), rows)
    report(5, "kernel size <= 20 d_TBR", len(reduction_corpus()), bad,
           f"max kernel leaves/d_TBR = {max(ratios, default=0):.2f}, stats in {path}")


def test_criterion_06_greedy_guarantees(report):
    start = time.perf_counter()
    bad = []
    with_d = 0
    for i in range(200):
        n = 4 + i % 13
        T1, T2 = random_pair(n, 60_000 + i)
        res = greedy_leg_disjoint(T1, T2)
        d = dtbr_hitting_set(T1, T2)[0]
        with_d += 1
        bad += [f"seed {i}: {v}" for v in check_greedy(T1, res, d)]
    report(6, "greedy leg-disjoint guarantees", 200, bad,
           f"d_TBR known for {with_d}, {time.perf_counter() - start:.1f}s")


def test_criterion_07_witness_soundness(report, stats_dir):
    start = time.perf_counter()
    bad = []
    rows = []
    for i in range(200):
        n = 4 + i % 6
        T1, T2 = random_pair(n, 70_000 + i)
        c = read_certificate(write_certificate(certified_lower_bound(T1, T2)))
        rep = verify_certificate(T1, T2, c)
        k = len(c.quartets)
        if not rep:
            bad.append(f"seed {i}: rejected {rep.failures}")
            continue
        if not rep.gap >= c.claimed_bound >= -(-k // 3):
            bad.append(f"seed {i}: gap {rep.gap}, bound {c.claimed_bound}, {k} selected")
        if 9 * k < c.greedy_quartet_count:
            bad.append(f"seed {i}: 9 * {k} selected < {c.greedy_quartet_count} greedy quartets")
        dmp = dmp_exact(T1, T2, 2)
        if c.claimed_bound > dmp:
            bad.append(f"seed {i}: bound {c.claimed_bound} > d_MP {dmp}")
        rows.append((i, n, c.greedy_quartet_count, k, c.claimed_bound, rep.gap, dmp, c.tbr_upper_bound))
    path = os.path.join(stats_dir, "witness_bounds.csv")
    write_csv(path, ("pair", "n", "greedy_quartets", "selected", "bound", "fitch_gap", "dmp2",
                     "tbr_upper"), rows)
    report(7, "witness soundness and strength", 200, bad,
           f"{time.perf_counter() - start:.1f}s, stats in {path}")


def test_criterion_08_tamper_suite(report):
    pool = []
    seed = 80_000
    while len(pool) < 25:
        T1, T2 = random_pair(6 + seed % 7, seed)
        c = certified_lower_bound(T1, T2)
        if c.quartets:
            pool.append((T1, T2, c))
        seed += 1
    bad = []
    count = 0
    for kind in KINDS:
        for j, (T1, T2, c) in enumerate(pool):
            count += 1
            bad_c = mutate(kind, c, j, T1, T2)
            if verify_certificate(T1, T2, bad_c):
                bad.append(f"{kind} #{j}: accepted")
    report(8, "tampered certificates rejected", count, bad)


def test_criterion_09_bound_chain(report):
    bad = []
    for i, T1, T2, _, _ in reduction_corpus():
        n = T1.n_leaves
        d, k = d_tbr(T1, T2), dmp_exact(T1, T2, 2)
        if d > 54 * k * (lg(n) + 1):
            bad.append(f"pair {i}: d_TBR={d} > 54*{k}*(lg {n} + 1)")
    report(9, "d_TBR <= 54 d_MP (lg n + 1)", len(reduction_corpus()), bad)


def _pipeline(tmp, tag, hashseed):
    env = dict(os.environ, PYTHONHASHSEED=str(hashseed))
    cli = [sys.executable, "-m", "parsikern.cli"]
    pair, kern, trace, cert = (tmp / f"{tag}.{ext}" for ext in ("nwk", "kern.nwk", "trace.json", "cert.json"))
    for argv in (["gen", "--n", "14", "--moves", "4", "--seed", "2024", "-o", pair],
                 ["reduce", "-i", pair, "-o", kern, "--trace", trace],
                 ["certify", "-i", pair, "-o", cert, "--threads", "2"]):
        subprocess.run(cli + [str(a) for a in argv], check=True, env=env, capture_output=True)
    return [p.read_bytes() for p in (pair, kern, trace, cert)]


def test_criterion_10_determinism(report, tmp_path):
    runs = [_pipeline(tmp_path, f"run{k}", hs) for k, hs in enumerate((0, 1, 12345))]
    names = ("newick", "kernel", "trace", "certificate")
    bad = [f"{name} differs between runs" for j, name in enumerate(names)
           if len({r[j] for r in runs}) != 1]
    report(10, "byte-identical reruns", len(runs), bad)
